import argparse
import logging

import pandas as pd

from .stats import load_final
from ..utils.exception import StatsError
from ..utils.svg import SVG

log = logging.getLogger(__name__)

COLORS = ['#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd', '#8c564b', '#e377c2', '#7f7f7f']

# panel geometry
WIDTH, HEIGHT = 900, 400
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 60, 110, 40, 50


def add_parser(subparsers):
    # create parser
    parser = subparsers.add_parser('plot', help='Plots mean final MJI against loss probability per number of '
                                                'lossy clients, shallow and deep split side by side',
                                   formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument('--csv', type=str, help='Experiment CSV', required=True)
    parser.add_argument('--out', type=str, help='SVG file to write', required=True)
    parser.add_argument('--aggregator', type=str, help='Only plot runs of this aggregator')

    # argparse wrapper for plot
    def run(args):
        svg = plot(select(load_final(args.csv), args.aggregator))
        svg.save(args.out)
        log.info('Wrote plot to %s.', args.out)
    parser.set_defaults(func=run)


def select(final: pd.DataFrame, aggregator: str = None) -> pd.DataFrame:
    """Final rows of split runs to plot, of one aggregator or pooled over all.

    Args:
        final: Final rows of an experiment CSV.
        aggregator: If given, only rows of this aggregator.

    Returns:
        Selected rows.

    Raises:
        StatsError: If no shallow or deep rows remain.
    """
    if aggregator is None:
        log.info('No aggregator given, pooling runs of %s.', ', '.join(sorted(set(final['aggregator']))))
    else:
        final = final[final['aggregator'] == aggregator]
    final = final[final['split'].isin(['shallow', 'deep'])]
    if len(final) == 0:
        raise StatsError('No runs to plot.', aggregator=aggregator)
    return final


def plot(final: pd.DataFrame) -> SVG:
    """Draws one panel per split with a polyline of mean final MJI over p_loss for each number of lossy
    clients.

    Args:
        final: Final rows of an experiment CSV.

    Returns:
        SVG document.
    """
    svg = SVG(WIDTH, HEIGHT)
    svg.rect(0, 0, WIDTH, HEIGHT, fill='white')
    means = final.groupby(['split', 'n_lossy_clients', 'p_loss'])['mji'].mean().reset_index()
    panel_width = WIDTH / 2.

    for i, split in enumerate(['shallow', 'deep']):
        x0 = i * panel_width + MARGIN_LEFT
        w = panel_width - MARGIN_LEFT - MARGIN_RIGHT
        h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

        def px(p_loss):
            return x0 + p_loss * w

        def py(mji):
            return MARGIN_TOP + (1. - mji) * h

        # axes and ticks
        svg.group_start(id='panel-%s' % split)
        svg.text(x0 + w / 2., MARGIN_TOP - 15, '%s split' % split, text_anchor='middle', font_size=14)
        svg.rect(x0, MARGIN_TOP, w, h, fill='none', stroke='black')
        for t in [0., 0.2, 0.4, 0.6, 0.8, 1.]:
            svg.line(px(t), MARGIN_TOP + h, px(t), MARGIN_TOP + h + 5, stroke='black')
            svg.text(px(t), MARGIN_TOP + h + 18, '%.1f' % t, text_anchor='middle', font_size=10)
            svg.line(x0 - 5, py(t), x0, py(t), stroke='black')
            svg.text(x0 - 8, py(t) + 3, '%.1f' % t, text_anchor='end', font_size=10)
        svg.text(x0 + w / 2., HEIGHT - 12, 'P_L', text_anchor='middle', font_size=12)
        svg.text(x0 - 40, MARGIN_TOP + h / 2., 'MJI', text_anchor='middle', font_size=12)

        # one line per number of lossy clients
        rows = means[means['split'] == split]
        for j, (n_lossy, line) in enumerate(rows.groupby('n_lossy_clients')):
            color = COLORS[j % len(COLORS)]
            line = line.sort_values('p_loss')
            points = [(px(p), py(m)) for p, m in zip(line['p_loss'], line['mji'])]
            svg.polyline(points, stroke=color, stroke_width=1.5, class_='n-lossy-%d' % n_lossy)
            for x, y in points:
                svg.circle(x, y, 2.5, fill=color)

            # legend
            ly = MARGIN_TOP + 10 + j * 16
            svg.line(x0 + w + 10, ly, x0 + w + 30, ly, stroke=color, stroke_width=1.5)
            svg.text(x0 + w + 35, ly + 4, 'N_c = %d' % n_lossy, font_size=10)
        svg.group_end()

    return svg


__all__ = ['select', 'plot']
