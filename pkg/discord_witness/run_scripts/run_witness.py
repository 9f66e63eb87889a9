import argparse
import logging
import sys

from discord_witness.preprocessing.state_io import read_state, write_state
from discord_witness.preprocessing.states import (assemble_cq, bell_state, classical_mixture_family,
                                                  random_cq_spec, random_state, werner_family)
from discord_witness.run_scripts.evaluation import METHODS, evaluate_state
from discord_witness.run_scripts.selftest import run_selftest
from discord_witness.run_scripts.sweep import parameter_grid, run_sweep, write_sweep_csv
from discord_witness.utils.config import load_config

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2

GEN_FAMILIES = ["random", "cq", "bell", "werner", "mixture"]
SWEEP_FAMILIES = ["werner", "mixture"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discord-witness",
                                     description="Four-copy quantum discord witness toolkit")
    parser.add_argument("-cnf", "--config", type=str, default=None, help="YAML file overriding the defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a state file")
    gen.add_argument("family", choices=GEN_FAMILIES)
    gen.add_argument("--dA", type=int, default=2)
    gen.add_argument("--dB", type=int, default=2)
    gen.add_argument("--rank", type=int, default=None)
    gen.add_argument("--p", type=float, default=None)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("-o", "--out", type=str, required=True)

    ev = sub.add_parser("eval", help="evaluate the witness on a state file")
    ev.add_argument("state", type=str)
    ev.add_argument("-md", "--method", choices=METHODS, default="commutator")
    ev.add_argument("--threshold", type=float, default=None)
    ev.add_argument("--shots", type=int, default=None)
    ev.add_argument("--seed", type=int, default=None)
    ev.add_argument("--assert-zero", action="store_true", help="exit 1 unless the verdict is zero discord")
    ev.add_argument("--discord", action="store_true", help="also minimize the discord (dA = 2 only)")

    sw = sub.add_parser("sweep", help="sweep a one-parameter family into a CSV table")
    sw.add_argument("family", choices=SWEEP_FAMILIES)
    sw.add_argument("--start", type=float, default=0.0)
    sw.add_argument("--stop", type=float, default=1.0)
    sw.add_argument("--step", type=float, default=0.1)
    sw.add_argument("--methods", type=str, default="commutator", help="comma separated, e.g. commutator,permutation")
    sw.add_argument("--shots", type=int, default=None)
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--discord", action="store_true")
    sw.add_argument("-m", "--multiprocessor", choices=["cf", "mpi"], default=None)
    sw.add_argument("-o", "--out", type=str, required=True)

    st = sub.add_parser("selftest", help="run the invariant self-test suite")
    st.add_argument("--seed", type=int, default=0)
    return parser


def cmd_gen(args, config) -> int:
    if args.family in ["werner", "mixture"] and args.p is None:
        raise ValueError(f"Family {args.family} needs --p")
    if args.family == "random":
        state = random_state(args.dA, args.dB, rank=args.rank, seed=args.seed)
    elif args.family == "cq":
        state = assemble_cq(random_cq_spec(args.dA, args.dB, seed=args.seed))
    elif args.family == "bell":
        state = bell_state()
    elif args.family == "werner":
        state = werner_family(args.p)
    else:
        state = classical_mixture_family(args.p)
    write_state(state, args.out)
    return EXIT_OK


def cmd_eval(args, config) -> int:
    if args.threshold is not None:
        config["witness"]["threshold"] = args.threshold
    state = read_state(args.state)
    record = evaluate_state(state, args.method, {"path": args.state}, config,
                            shots=args.shots, seed=args.seed, with_discord=args.discord)
    print(record.to_json())
    if args.assert_zero and not record.zero_discord:
        logging.error(f"❌ Zero-discord assertion failed: witness value {record.value:.6e}")
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_sweep(args, config) -> int:
    parameters = parameter_grid(args.start, args.stop, args.step)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    multiprocessor = args.multiprocessor or config["sweep"]["multiprocessor"]
    table = run_sweep(args.family, parameters, methods, config, shots=args.shots, seed=args.seed,
                      with_discord=args.discord, multiprocessor=multiprocessor)
    if table is not None:
        write_sweep_csv(table, args.out)
    return EXIT_OK


def cmd_selftest(args, config) -> int:
    checks = run_selftest(seed=args.seed, reconstruct_tol=config["reconstruct"]["tol"],
                          max_retries=config["reconstruct"]["max_retries"])
    for check in checks:
        print(check.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_ASSERTION if failed else EXIT_OK


COMMANDS = {"gen": cmd_gen, "eval": cmd_eval, "sweep": cmd_sweep, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.quiet:
        logging.getLogger().setLevel(logging.WARNING)
    try:
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except (ValueError, OSError, AssertionError) as e:
        logging.error(f"❌ {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
