"""
Plots for cut-elimination traces and batch verdicts.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

sns.set_palette("husl")

VERDICT_COLORS = {'Proved': 'green', 'Unknown': 'orange', 'Open': 'red', 'Error': 'gray'}


def plot_elimination_trace(trace: pd.DataFrame, save_path: str | Path = "cutelim_trace.png") -> str | Path | None:
    """
    Rank and weight of the cut rewritten at each step (top) and the number
    of cuts still in the proof (bottom).
    """
    if trace.empty:
        print("No rewrite steps to plot")
        return None

    plt.figure(figsize=(15, 8))

    plt.subplot(2, 1, 1)
    plt.plot(trace['Step'], trace['Rank'], 'o-', linewidth=2, markersize=6, alpha=0.7, label='Rank')
    plt.plot(trace['Step'], trace['Weight'], 's-', linewidth=2, markersize=6, alpha=0.7, label='Weight')
    for case, group in trace.groupby('Case'):
        plt.scatter(group['Step'], group['Rank'], s=100, alpha=0.8, label=f'Case {case} ({len(group)})')
    plt.title('✂️ Cut Elimination - Measure of the Rewritten Cut', fontsize=16, fontweight='bold')
    plt.ylabel('Rank / Weight', fontsize=12)
    plt.legend()
    plt.grid(True, alpha=0.3)

    plt.subplot(2, 1, 2)
    cuts = pd.to_numeric(trace['Cuts_Left'], errors='coerce')
    plt.step(trace['Step'], cuts, where='post', linewidth=2, color='purple')
    plt.title('Cuts Remaining', fontsize=14)
    plt.ylabel('Cuts', fontsize=12)
    plt.xlabel('Step', fontsize=12)
    plt.grid(True, alpha=0.3)

    plt.tight_layout()
    plt.savefig(save_path, dpi=300, bbox_inches='tight')
    plt.close()

    print(f"📊 Elimination trace saved: {save_path}")
    return save_path


def plot_verdicts(summary_csv: str | Path, save_path: str | Path = "proof_verdicts.png") -> str | Path | None:
    """Verdict counts per logic and calculus from a summary CSV."""
    if not os.path.exists(summary_csv):
        print(f"❌ Summary file not found: {summary_csv}")
        return None
    df = pd.read_csv(summary_csv)
    if df.empty:
        print("No results to plot")
        return None

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(15, 6))

    sns.countplot(data=df, x='Logic', hue='Verdict', palette=VERDICT_COLORS, ax=ax1)
    ax1.set_title('Verdicts by Logic', fontsize=14, fontweight='bold')
    ax1.set_ylabel('Number of Formulas')
    ax1.tick_params(axis='x', rotation=45)

    counts = df.groupby(['Calculus', 'Verdict']).size().unstack(fill_value=0)
    counts.plot(kind='bar', stacked=True, ax=ax2,
                color=[VERDICT_COLORS.get(v, 'gray') for v in counts.columns])
    ax2.set_title('Verdicts by Calculus', fontsize=14, fontweight='bold')
    ax2.set_ylabel('Number of Formulas')
    ax2.tick_params(axis='x', rotation=0)

    for bar in ax2.patches:
        if bar.get_height() > 0:
            ax2.text(bar.get_x() + bar.get_width()/2, bar.get_y() + bar.get_height()/2,
                     str(int(bar.get_height())), ha='center', va='center', fontweight='bold')

    plt.tight_layout()
    plt.savefig(save_path, dpi=300, bbox_inches='tight')
    plt.close(fig)

    print(f"📊 Verdict breakdown saved: {save_path}")
    return save_path
