# fifogap.py

import argparse
import logging
import sys

import config
from module_cli.commands import cmd_pack, cmd_plot, cmd_sweep

logger = logging.getLogger('fifogap')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='fifogap',
        description='Welfare gap between FIFO and optimal block packing.')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='warnings and errors only')
    sub = parser.add_subparsers(dest='command', required=True)

    # --- pack: one instance file ---
    pack = sub.add_parser('pack', help='pack a single instance file every way')
    pack.add_argument('instance', help='instance file: `b g B- B+` then `q_tilde gas` per line')
    pack.add_argument('--json', action='store_true', help='print the machine-readable report')
    pack.add_argument('--exact-limit', type=int, default=None,
                      help='largest n solved exactly (default: $FIFOGAP_EXACT_LIMIT or 30)')

    # --- sweep: Monte Carlo experiment ---
    sweep = sub.add_parser('sweep', help='run a block-size sweep and write the trial CSV')
    sweep.add_argument('config', help='key = value experiment config file')
    sweep.add_argument('--seed', type=int, default=None, help='override master_seed')
    sweep.add_argument('--out', default=None, help='CSV output path (overrides `out`)')
    sweep.add_argument('--threads', type=int, default=None,
                       help='worker threads (default: $FIFOGAP_THREADS or 1)')
    sweep.add_argument('--xlsx', default=None, help='also write a summary workbook')
    sweep.add_argument('--plot-dir', default=None, help='also write SVG figures here')

    # --- plot: figures from a sweep CSV ---
    plot = sub.add_parser('plot', help='SVG figures from a sweep CSV')
    plot.add_argument('csv', help='CSV written by `sweep`')
    plot.add_argument('--out', default=config.GENERATED_DIR, help='output directory (default: %(default)s)')
    plot.add_argument('--dists', action='store_true', help='also plot the utility distribution densities')
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else config.LOG_LEVEL
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        if args.command == 'pack':
            return cmd_pack(args.instance, as_json=args.json, exact_limit=args.exact_limit)
        if args.command == 'sweep':
            return cmd_sweep(args.config, seed=args.seed, out=args.out, threads=args.threads,
                             xlsx=args.xlsx, plot_dir=args.plot_dir)
        return cmd_plot(args.csv, args.out, dists=args.dists)
    except Exception as e:
        logger.exception(f"{args.command} failed: {type(e).__name__}: {e}")
        return 1


if __name__ == '__main__':
    sys.exit(main())
