#!/usr/bin/env python3
"""Replay the contradiction scenario across a strategy and claims grid.

For every strategy and every claimed (staleness, latency) pair that
undercuts the partition span, the checker must find at least one
violation. Prints one summary line per strategy and exits nonzero if
any run came back clean.
"""

import argparse
import itertools
import sys

from capsim.config import StrategyParams
from capsim.harness import ProofReplaySpec, bound_slack, proof_replay


def strategy_suite():
    return [
        StrategyParams("LocalFirst", anti_entropy_period=2),
        StrategyParams("LocalFirst", anti_entropy_period=4),
        StrategyParams("SyncAll", retransmit_period=2),
        StrategyParams("HybridDeadline", retransmit_period=2, deadline=0),
        StrategyParams("HybridDeadline", retransmit_period=2, deadline=4),
        StrategyParams("HybridDeadline", retransmit_period=2, deadline=8),
        StrategyParams("HybridDeadline", retransmit_period=2, deadline=12),
    ]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--tp", default="10,20,40", help="comma-separated partition spans"
    )
    parser.add_argument("--latency", type=int, default=1)
    args = parser.parse_args(argv)

    spans = [int(part) for part in args.tp.split(",") if part]
    claim_grid = [0, 1, 2, 3, 5, 8, 13, 21, 34]
    clean_runs = 0
    for params in strategy_suite():
        slack = bound_slack(params, args.latency)
        runs = 0
        violated = 0
        for tp in spans:
            for ctc, cta in itertools.product(claim_grid, claim_grid):
                if ctc + cta > tp - slack - 1:
                    continue
                spec = ProofReplaySpec(
                    strategy=params,
                    tp=tp,
                    claimed_tc=ctc,
                    claimed_ta=cta,
                    latency=args.latency,
                )
                report = proof_replay(spec)
                runs += 1
                if report.violations:
                    violated += 1
        clean_runs += runs - violated
        label = ",".join(f"{k}={v}" for k, v in params.to_dict().items())
        print(f"{label}: {violated}/{runs} runs violated the claim")
    if clean_runs:
        print(f"{clean_runs} runs unexpectedly satisfied their claim")
        return 1
    print("every undercutting claim was refuted")
    return 0


if __name__ == "__main__":
    sys.exit(main())
