"""
experiment_plots.py
SVG figures from sweep results: for each distribution, the realized ratio band
p0/p_fifo .. r*/p_fifo against the analytic ratio bound, and the analytic gap
L - U against the realized gap p0 - p_fifo, both versus block size. Also the
density figure of the utility distributions.

SVG output is pinned (fixed hash salt, no date metadata) so identical inputs
give identical files.
"""
import logging
import os
import re

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from module_block_building.errors import ConfigError  # noqa: E402

from .dists import parse_distribution  # noqa: E402
from .experiment import summarize_frame  # noqa: E402

logger = logging.getLogger(__name__)

SVG_METADATA = {'Date': None, 'Creator': 'fifogap'}
RC_PARAMS = {'svg.hashsalt': 'fifogap', 'svg.fonttype': 'none', 'font.size': 9}

BAND_COLOR = '#198754'
BOUND_COLOR = '#B02A37'


def _slug(distribution_name):
    try:
        return parse_distribution(distribution_name).slug
    except ConfigError:
        return re.sub(r'[^a-z0-9.]+', '-', distribution_name.lower()).strip('-')


def _save(fig, path):
    fig.savefig(path, format='svg', metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"Figure written: {path}")
    return path


def _ratio_figure(name, block):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = block['block_size'].to_numpy()
    ax.fill_between(x, block['ratio_lb_mean'], block['ratio_ub_mean'], color=BAND_COLOR, alpha=0.3,
                    label='realized p*/p_fifo (p0 .. r* bracket)')
    ax.plot(x, block['ratio_lb_mean'], color=BAND_COLOR, marker='o', markersize=3)
    ax.plot(x, block['bound_ratio_mean'], color=BOUND_COLOR, linestyle='--', marker='s', markersize=3,
            label='analytic ratio bound')
    ax.axhline(1.0, color='black', linewidth=0.6)
    ax.set_xscale('log')
    ax.set_xlabel('block size (gas)')
    ax.set_ylabel('optimal / FIFO utility')
    ax.set_title(f'q ~ {name}')
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def _gap_figure(name, block):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    x = block['block_size'].to_numpy()
    ax.plot(x, block['gap_realized_mean'], color=BAND_COLOR, marker='o', markersize=3,
            label='realized gap p0 - p_fifo')
    ax.plot(x, block['gap_lower_mean'], color=BOUND_COLOR, linestyle='--', marker='s', markersize=3,
            label='analytic L - U')
    ax.axhline(0.0, color='black', linewidth=0.6)
    ax.set_xscale('log')
    ax.set_xlabel('block size (gas)')
    ax.set_ylabel('utility gap')
    ax.set_title(f'q ~ {name}')
    ax.legend(frameon=False)
    fig.tight_layout()
    return fig


def plot_sweep(frame, out_dir):
    """One ratio figure and one gap figure per distribution in `frame`; returns the paths written."""
    summary = summarize_frame(frame)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    with plt.rc_context(RC_PARAMS):
        for name, block in summary.groupby('distribution', sort=False):
            block = block.sort_values('block_size')
            slug = _slug(name)
            paths.append(_save(_ratio_figure(name, block), os.path.join(out_dir, f'gap-ratio-{slug}.svg')))
            paths.append(_save(_gap_figure(name, block), os.path.join(out_dir, f'gap-lower-{slug}.svg')))
    return paths


def plot_distribution_densities(dists, out_dir, x_max=8.0):
    """Density curves, light-tailed and heavy-tailed distributions side by side."""
    os.makedirs(out_dir, exist_ok=True)
    xs = np.linspace(1e-3, x_max, 800)
    with plt.rc_context(RC_PARAMS):
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.5), sharey=True)
        for ax, heavy, title in ((axes[0], False, 'light-tailed'), (axes[1], True, 'heavy-tailed')):
            for d in dists:
                if d.heavy_tailed == heavy:
                    ax.plot(xs, d.pdf(xs), label=d.name)
            ax.set_title(f'{title} utility distributions')
            ax.set_xlabel('utility')
            ax.legend(frameon=False)
        axes[0].set_ylabel('density')
        fig.tight_layout()
        return _save(fig, os.path.join(out_dir, 'distributions.svg'))
