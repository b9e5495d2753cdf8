"""Experiment execution and report assembly behind the command line.

Reports are plain dicts of builtin types so they serialize byte-identically
for a fixed config and seed. Wall-clock timing is deliberately kept out of
these dicts; the text renderer may add it, machine output never carries it.
"""

from __future__ import annotations

from .config import ExperimentConfig
from .costs import (
    STRATEGIES,
    baseline_cost,
    candidate_budget_validity,
    cost_breakdown,
    times_ratio,
)
from .errors import ConfigurationError
from .grover import QueryCounter, iteration_count
from .oracles import (
    ConcatenatedOracle,
    ConjunctionOracle,
    PartialCandidateSet,
    bits_to_int,
    eval_oracle,
    int_to_bits,
)
from .permutation import apply_cnot_permutation, build_permutation, compacted_search_state
from .statevector import (
    KernelCrossCheck,
    QubitSet,
    Statevector,
    basis_state,
    partition_purity,
    probability_map,
    qubit_range,
    sample,
    top_outcome,
)
from .strategies import (
    SearchProblem,
    SearchResult,
    block_distribution,
    disentangled_layout,
    disentangled_search,
    entangled_nested,
    flag_excitation,
    iterative_search,
    iterative_trial_state,
    product_subspace_search,
    recover_candidate,
)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_UNVERIFIED = 2

CROSSCHECK_TOLERANCE = 1e-10
DENSE_CHECK_MAX_M = 8

_BUDGETED = ("iterative", "disentangled", "permutation-basis-prep", "permutation-grover-prep")


def merge_counts(sv: Statevector, counts: dict[str, int]) -> dict[str, dict]:
    """Join sampled counts with exact probabilities over the union support.

    Counts sum to the shot count; probabilities sum to 1 up to the support
    floor of the probability map.
    """
    exact = probability_map(sv)
    return {
        label: {
            "count": int(counts.get(label, 0)),
            "probability": float(exact.get(label, 0.0)),
        }
        for label in sorted(set(counts) | set(exact))
    }


def exact_histogram(sv: Statevector, shots: int, seed) -> dict[str, dict]:
    return merge_counts(sv, sample(sv, shots, seed=seed))


def _purity_section(sv: Statevector, cuts) -> list[dict]:
    section = []
    for cut in cuts:
        part = QubitSet(tuple(cut))
        section.append(
            {"qubits": list(part.indices), "purity": float(partition_purity(sv, part))}
        )
    return section


def _queries_section(counter: QueryCounter) -> dict:
    return {
        "oracle_calls": int(counter.oracle_calls),
        "diffusion_calls": int(counter.diffusion_calls),
        "total": int(counter.total),
    }


def _result_section(result: SearchResult) -> dict:
    return {
        "found": result.found,
        "candidate_index": result.candidate_index,
        "verified": bool(result.verified),
        "trials": int(result.trials),
    }


def _cost_strategy(config: ExperimentConfig) -> str:
    if config.strategy == "product":
        return "decomposition-ideal"
    if config.strategy == "entangled":
        # the fully entangled run amplifies against the global oracle, so
        # it is costed as an unstructured search over the whole register
        return "baseline"
    if config.strategy == "permutation":
        return f"permutation-{config.prep}-prep"
    return config.strategy


def _cost_section(config: ExperimentConfig) -> dict:
    name = _cost_strategy(config)
    breakdown = cost_breakdown(name, config.m, g=config.g, v=config.v)
    section = {
        "strategy": name,
        "m": int(config.m),
        "g": int(config.g),
        "v": int(config.v),
        "total": float(breakdown.total),
        "terms": {label: float(value) for label, value in breakdown.terms.items()},
    }
    if name in _BUDGETED:
        validity = candidate_budget_validity(config.m, config.v)
        section["validity"] = {
            "constraint": validity.constraint,
            "holds": bool(validity.holds),
            "margin": float(validity.margin),
        }
    return section


def run_experiment(config: ExperimentConfig) -> tuple[dict, int]:
    """Execute the configured strategy and assemble its report.

    Returns the report plus the suggested process exit code: 0 when the
    run verified its answer (or pure state preparation succeeded), 2 when
    every trial was exhausted without verification.
    """
    problem = config.problem()
    counter = QueryCounter()
    artifact: dict = {
        "config": config.to_dict(),
        "endianness": "little",
        "strategy": config.strategy,
    }
    exit_code = EXIT_OK
    result: SearchResult | None = None

    if config.strategy == "product":
        sv = product_subspace_search(problem, counter)
        histogram = exact_histogram(sv, config.shots, config.seed)
        default_cut = problem.lower_qubits
    elif config.strategy == "entangled":
        sv = entangled_nested(problem, counter)
        histogram = exact_histogram(sv, config.shots, config.seed)
        default_cut = problem.lower_qubits
    elif config.strategy == "iterative":
        result = iterative_search(
            problem, shots_per_trial=config.shots_per_trial,
            seed=config.seed, counter=counter,
        )
        trials = []
        for k in range(1, result.trials + 1):
            trial_sv = iterative_trial_state(problem, k)
            counts = sample(trial_sv, config.shots_per_trial, seed=(config.seed, k))
            trial_hist = merge_counts(trial_sv, counts)
            top = top_outcome(counts)
            trials.append(
                {
                    "candidate_index": k,
                    "candidate": problem.candidates.strings()[k - 1],
                    "top_outcome": top,
                    "accepted": bool(eval_oracle(problem.global_oracle, top)),
                    "histogram": trial_hist,
                }
            )
        artifact["trials"] = trials
        sv = iterative_trial_state(problem, result.trials)
        histogram = trials[-1]["histogram"]
        default_cut = problem.lower_qubits
        if not result.verified:
            exit_code = EXIT_UNVERIFIED
    elif config.strategy == "disentangled":
        outcome = disentangled_search(problem, counter)
        sv = outcome.state
        layout = disentangled_layout(problem)
        blocks = []
        for k in range(1, problem.v + 1):
            dist = block_distribution(problem, sv, k)
            blocks.append(
                {
                    "index": k,
                    "candidate": problem.candidates.strings()[k - 1],
                    "target_probability": float(
                        dist.get(problem.upper_target_bits, 0.0)
                    ),
                    "flag_excitation": float(flag_excitation(problem, sv, k)),
                    "distribution": {b: float(p) for b, p in sorted(dist.items())},
                }
            )
        artifact["blocks"] = blocks
        artifact["winning_index"] = outcome.winning_index
        if outcome.winning_index is None:
            exit_code = EXIT_UNVERIFIED
        else:
            result = recover_candidate(
                problem, outcome.winning_index,
                shots=config.shots, seed=config.seed, counter=counter,
            )
            if not result.verified:
                exit_code = EXIT_UNVERIFIED
        histogram = exact_histogram(sv, config.shots, config.seed)
        default_cut = layout.lower
    elif config.strategy == "permutation":
        sv = compacted_search_state(
            problem, counter, prep=config.prep, convention=config.convention
        )
        counts = sample(sv, config.shots, seed=config.seed)
        top = top_outcome(counts)
        counter.count_oracle()
        verified = bool(eval_oracle(problem.global_oracle, top))
        result = SearchResult(
            found=top if verified else None,
            candidate_index=(
                problem.candidates.index_of(bits_to_int(top) & (2**config.g - 1))
                if verified
                else None
            ),
            verified=verified,
            queries=counter,
            trials=1,
        )
        spec = build_permutation(problem.candidates.strings(), convention=config.convention)
        artifact["relabeling"] = {
            "convention": spec.convention,
            "code_width": int(spec.code_width),
            "mapping": list(spec.mapping),
            "transpositions": [list(pair) for pair in spec.transpositions],
        }
        histogram = merge_counts(sv, counts)
        default_cut = problem.lower_qubits
        if not verified:
            exit_code = EXIT_UNVERIFIED
    else:
        raise ConfigurationError(f"unknown strategy {config.strategy!r}")

    cuts = config.purity_cuts if config.purity_cuts else (default_cut.indices,)
    for cut in cuts:
        bad = [q for q in cut if q >= sv.num_qubits]
        if bad:
            raise ConfigurationError(
                f"purity cut {list(cut)} exceeds the {sv.num_qubits}-qubit state"
            )
    artifact["histogram"] = histogram
    artifact["purity"] = _purity_section(sv, cuts)
    artifact["queries"] = _queries_section(counter)
    if result is not None:
        artifact["result"] = _result_section(result)
    artifact["cost"] = _cost_section(config)
    return artifact, exit_code


def _cnot_equivalence(config: ExperimentConfig) -> dict:
    """Exhaustively compare the controlled-not realization to the mapping."""
    spec = build_permutation(
        tuple(config.candidates), convention=config.convention
    )
    flags = len(spec.transpositions)
    total = spec.width + flags
    if total > 12:
        raise ConfigurationError(
            f"controlled-not check needs {total} qubits, limit is 12"
        )
    data = qubit_range(0, spec.width)
    flag_set = qubit_range(spec.width, total)
    worst = 0.0
    for source in range(2**spec.width):
        out = apply_cnot_permutation(basis_state(total, source), spec, data, flag_set)
        expected = basis_state(total, spec.mapping[source])
        deviation = float(abs(out.amplitudes - expected.amplitudes).max())
        worst = max(worst, deviation)
    return {
        "basis_states": 2**spec.width,
        "flag_qubits": flags,
        "max_deviation": worst,
    }


def run_verification(config: ExperimentConfig) -> tuple[dict, int]:
    """Replay the config's pipeline with every kernel mirrored densely."""
    if config.m > DENSE_CHECK_MAX_M:
        raise ConfigurationError(
            f"dense cross-check is limited to m <= {DENSE_CHECK_MAX_M}, got m={config.m}"
        )
    problem = config.problem()
    with KernelCrossCheck(max_qubits=12) as check:
        if config.strategy == "product":
            product_subspace_search(problem)
        elif config.strategy == "entangled":
            entangled_nested(problem)
        elif config.strategy == "iterative":
            for k in range(1, problem.v + 1):
                iterative_trial_state(problem, k)
        elif config.strategy == "disentangled":
            outcome = disentangled_search(problem)
            if outcome.winning_index is not None:
                recover_candidate(problem, outcome.winning_index, shots=1, seed=0)
        elif config.strategy == "permutation":
            compacted_search_state(
                problem, prep=config.prep, convention=config.convention
            )
        else:
            raise ConfigurationError(f"unknown strategy {config.strategy!r}")

    worst_by_operation: dict[str, float] = {}
    for label, deviation in check.records:
        worst_by_operation[label] = max(worst_by_operation.get(label, 0.0), deviation)
    report: dict = {
        "config": config.to_dict(),
        "strategy": config.strategy,
        "tolerance": CROSSCHECK_TOLERANCE,
        "kernel_checks": {
            "count": len(check.records),
            "max_deviation": float(check.max_deviation),
            "by_operation": {
                label: float(value) for label, value in sorted(worst_by_operation.items())
            },
        },
    }
    passed = check.max_deviation <= CROSSCHECK_TOLERANCE
    if config.strategy == "permutation":
        cnot = _cnot_equivalence(config)
        report["cnot_check"] = cnot
        passed = passed and cnot["max_deviation"] <= CROSSCHECK_TOLERANCE
    report["passed"] = bool(passed)
    return report, EXIT_OK if passed else EXIT_UNVERIFIED


def run_sweep(
    m: int = 5, g: int = 3, shots_per_trial: int = 256, seed: int = 0
) -> tuple[dict, int]:
    """Exercise the trial loop over every placement of the lower target.

    Each placement pairs the target with its bitwise complement as a decoy
    listed first, so half the probes start on a wrong candidate. Every run
    must verify within the oracle budget v * (r_L + r_U + 1).
    """
    if not 1 <= g < m:
        raise ConfigurationError(f"need 1 <= g < m, got g={g}, m={m}")
    upper_bits = "1" + "0" * (m - g - 1)
    r_lower = iteration_count(2**g, 1)
    r_upper = iteration_count(2 ** (m - g), 1)
    budget = 2 * (r_lower + r_upper + 1)
    rows = []
    all_ok = True
    for value in range(2**g):
        target = int_to_bits(value, g)
        decoy = int_to_bits(value ^ (2**g - 1), g)
        problem = SearchProblem(
            global_oracle=ConcatenatedOracle(
                upper=ConjunctionOracle.matching(upper_bits),
                lower=ConjunctionOracle.matching(target),
            ),
            candidates=PartialCandidateSet.from_strings([decoy, target]),
        )
        counter = QueryCounter()
        result = iterative_search(
            problem, shots_per_trial=shots_per_trial, seed=seed, counter=counter
        )
        within = counter.oracle_calls <= budget
        rows.append(
            {
                "lower_target": target,
                "decoy": decoy,
                "found": result.found,
                "verified": bool(result.verified),
                "trials": int(result.trials),
                "oracle_calls": int(counter.oracle_calls),
                "budget": int(budget),
                "within_budget": bool(within),
            }
        )
        all_ok = all_ok and result.verified and within
    report = {
        "m": int(m),
        "g": int(g),
        "upper_target": upper_bits,
        "shots_per_trial": int(shots_per_trial),
        "seed": int(seed),
        "endianness": "little",
        "rows": rows,
        "all_verified": bool(all_ok),
    }
    return report, EXIT_OK if all_ok else EXIT_UNVERIFIED


def cost_table(ms, vs, strategies) -> list[dict]:
    """One row per (m, v, strategy) with totals and validity annotations."""
    ms, vs = list(ms), list(vs)
    strategies = list(strategies)
    if not ms or not vs or not strategies:
        raise ConfigurationError("cost table needs non-empty m, v, and strategy lists")
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown:
        raise ConfigurationError(f"unknown strategies {unknown}, pick from {STRATEGIES}")
    rows = []
    for m in ms:
        for v in vs:
            for strategy in strategies:
                g = m // 2
                breakdown = cost_breakdown(strategy, m, g=g, v=v)
                row: dict = {
                    "strategy": strategy,
                    "m": int(m),
                    "g": int(g),
                    "v": int(v),
                    "total": float(breakdown.total),
                }
                if strategy in _BUDGETED:
                    validity = candidate_budget_validity(m, v)
                    row["valid"] = bool(validity.holds)
                    row["margin"] = float(validity.margin)
                elif strategy == "decomposition-ideal":
                    margin = baseline_cost(m) - breakdown.total
                    row["valid"] = bool(margin > 0)
                    row["margin"] = float(margin)
                else:
                    row["valid"] = True
                    row["margin"] = None
                row["times_ratio"] = (
                    float(times_ratio(m, v)) if strategy == "disentangled" else None
                )
                rows.append(row)
    return rows
