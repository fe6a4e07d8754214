#!/usr/bin/env python3
"""
Relaxation Current Lab - Command Line

Subcommands:
1. evolve     Evolve a scenario, write the sampled CSV (and optional summary)
2. currents   Print the current observable of every channel and projection
3. channel    Choi / heralding / semigroup diagnostics
4. verify     Run every invariant suite

Usage:
    python scripts/currentlab.py evolve --config data/two_level.json [--method rk4|exact] [--report]
    python scripts/currentlab.py currents --config data/three_level.json --basis data/energy_basis.json
    python scripts/currentlab.py channel choi --map transpose --dim 2
    python scripts/currentlab.py channel choi --map semigroup --config data/two_level.json --t 1
    python scripts/currentlab.py channel herald --psi 1 0 0 0
    python scripts/currentlab.py channel semigroup --config data/two_level.json --t 10
    python scripts/currentlab.py verify --seed 42

Exit codes: 0 success, 1 validation/verification failure, 2 numeric failure.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

import argparse

from commands import CHANNEL_SUBCOMMANDS, MAPS, CurrentLab, configure_logging
from scenario_config import METHODS
from verification import DEFAULT_SEED, FAULTS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='currentlab',
        description='Relaxation currents, Lindblad evolution and channel diagnostics',
    )
    parser.add_argument('--verbose', action='store_true', help='Debug logging')
    sub = parser.add_subparsers(dest='command', required=True)

    evolve = sub.add_parser('evolve', help='Evolve a scenario and write its CSV')
    evolve.add_argument('--config', required=True, help='Scenario JSON file')
    evolve.add_argument('--out', help='CSV path (overrides the config output)')
    evolve.add_argument('--method', choices=METHODS, help='Integrator (overrides the config)')
    evolve.add_argument('--dt', type=float, help='Step size (overrides the config)')
    evolve.add_argument('--t-final', dest='t_final', type=float, help='Final time (overrides the config)')
    evolve.add_argument('--report', action='store_true', help='Also save the Markdown run summary')

    cur = sub.add_parser('currents', help='Print current observables')
    cur.add_argument('--config', required=True, help='Scenario JSON file')
    cur.add_argument('--basis', help='Unitary basis file for transformed components')
    cur.add_argument('--out', help='Save the JSON report here')

    channel = sub.add_parser('channel', help='Channel diagnostics')
    channel.add_argument('action', choices=CHANNEL_SUBCOMMANDS)
    channel.add_argument('--map', dest='map_name', choices=MAPS, default='transpose', help='Map for choi')
    channel.add_argument('--dim', type=int, default=2, help='Dimension for identity/transpose/depolarizing')
    channel.add_argument('--config', help='Scenario JSON file (semigroup map)')
    channel.add_argument('--t', type=float, help='Time for the semigroup map')
    channel.add_argument('--psi', type=float, nargs=4, metavar=('RE0', 'IM0', 'RE1', 'IM1'),
                         help="Alice's test state amplitudes")
    channel.add_argument('--out', help='Save the JSON report here')

    verify = sub.add_parser('verify', help='Run every invariant suite')
    verify.add_argument('--seed', type=int, default=DEFAULT_SEED, help=f'Random seed (default: {DEFAULT_SEED})')
    verify.add_argument('--inject-fault', dest='inject_fault', choices=FAULTS,
                        help='Corrupt the validation suite (negative control)')

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    lab = CurrentLab()

    if args.command == 'evolve':
        return lab.evolve(args.config, out=args.out, method=args.method, dt=args.dt,
                          t_final=args.t_final, report=args.report)
    if args.command == 'currents':
        return lab.currents(args.config, basis_path=args.basis, out=args.out)
    if args.command == 'channel':
        return lab.channel(args.action, map_name=args.map_name, dim=args.dim, config_path=args.config,
                           t=args.t, psi=args.psi, out=args.out)
    return lab.verify(seed=args.seed, inject_fault=args.inject_fault)


if __name__ == "__main__":
    sys.exit(main())
