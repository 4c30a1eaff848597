"""Verification driver: closed forms against the numerical oracle.

For each family instance the driver draws seeded points from the family's
sampling box, compares analytic and numeric Fisher matrices, and compares
closed-form distances with the boundary-value solver.  The result is a
JSON-ready report with the worst relative error per family.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

import numpy as np

from .. import core
from ..errors import RaoDistError, UnsupportedError
from .fisher import numeric_fisher_expectation, relative_error
from .geodesic import MAX_BVP_DIM, solve_geodesic_bvp

FISHER_TOL = 1e-4
BVP_TOL = 3e-3

# every family with a summation or quadrature oracle, at representative
# hyperparameters
ORACLE_SUITE = (
    ("binomial", {"n": 1}),
    ("binomial", {"n": 5}),
    ("poisson", {}),
    ("geometric", {}),
    ("negative_binomial", {"r": 3}),
    ("categorical", {"categories": 3}),
    ("categorical", {"categories": 4}),
    ("multinomial", {"categories": 3, "trials": 4}),
    ("negative_multinomial", {"categories": 3, "x_n": 2}),
    ("exponential", {}),
    ("rayleigh", {}),
    ("erlang", {"k": 3}),
    ("log_gaussian", {}),
    ("inverse_gaussian", {}),
    ("gumbel", {}),
    ("frechet", {}),
    ("weibull", {}),
    ("reversed_weibull", {}),
    ("pareto", {}),
    ("power_function", {}),
    ("gaussian", {}),
    ("laplace", {}),
    ("logistic", {}),
    ("cauchy", {}),
    ("generalised_gaussian", {"beta": 0.75}),
    ("generalised_gaussian", {"beta": 1.5}),
    ("generalised_gaussian", {"beta": 3.0}),
    ("student_t", {"nu": 3.0}),
)


def check_family(fam: core.FamilyDescriptor, rng: np.random.Generator, n_points: int = 10,
                 n_pairs: int = 20, knots: int = 64, fisher_tol: float = FISHER_TOL,
                 bvp_tol: float = BVP_TOL, bvp: Optional[bool] = None) -> dict:
    """Oracle comparison for one family instance.

    Parameters
    ----------
    bvp : bool, optional
        Run the distance check; by default it runs for dimension <= 2
        (and is skipped above :data:`MAX_BVP_DIM` regardless).
    """
    entry = {"family": fam.label, "name": fam.name, "hyper": dict(fam.hyper)}
    notes = []
    fisher_err = None
    try:
        errs = []
        for _ in range(n_points):
            p = core.sample_point(fam, rng)
            errs.append(relative_error(numeric_fisher_expectation(p), core.fisher(p)))
        fisher_err = max(errs)
    except UnsupportedError as exc:
        notes.append(f"fisher skipped: {exc}")
    except RaoDistError as exc:
        notes.append(f"fisher failed: {exc}")
        fisher_err = float("inf")

    run_bvp = fam.dim <= 2 if bvp is None else bvp
    bvp_err = None
    if run_bvp and fam.dim <= MAX_BVP_DIM:
        errs = []
        try:
            for _ in range(n_pairs):
                p, q = core.sample_point(fam, rng), core.sample_point(fam, rng)
                d = core.distance(p, q)
                est = solve_geodesic_bvp(p, q, knots=knots).distance
                errs.append(abs(est - d) / d if d > 0 else abs(est))
            bvp_err = max(errs)
        except RaoDistError as exc:
            notes.append(f"bvp failed: {exc}")
            bvp_err = float("inf")
    elif run_bvp:
        notes.append(f"bvp skipped: dimension {fam.dim} > {MAX_BVP_DIM}")

    entry["fisher_max_rel_error"] = fisher_err
    entry["fisher_pass"] = None if fisher_err is None else bool(fisher_err <= fisher_tol)
    entry["bvp_max_rel_error"] = bvp_err
    entry["bvp_pass"] = None if bvp_err is None else bool(bvp_err <= bvp_tol)
    entry["pass"] = entry["fisher_pass"] is not False and entry["bvp_pass"] is not False
    entry["notes"] = notes
    return entry


def run_verification(seed: int = 0, suite: Optional[Iterable] = None, n_points: int = 10,
                     n_pairs: int = 20, knots: int = 64, fisher_tol: float = FISHER_TOL,
                     bvp_tol: float = BVP_TOL, workers: int = 1) -> dict:
    """Run the oracle suite and return the report.

    Each family receives its own generator spawned from ``seed``, so the
    report does not depend on the order or concurrency of evaluation.

    Returns
    -------
    dict
        ``{"seed", "thresholds", "families": [...], "pass"}``; each family
        entry holds the worst Fisher and distance relative errors and their
        pass flags (``None`` when a check does not apply).
    """
    suite = list(ORACLE_SUITE if suite is None else suite)
    fams = [core.get_family(name, **hyper) for name, hyper in suite]
    seqs = np.random.SeedSequence(seed).spawn(len(fams))

    def job(k):
        return check_family(fams[k], np.random.default_rng(seqs[k]), n_points=n_points,
                            n_pairs=n_pairs, knots=knots, fisher_tol=fisher_tol,
                            bvp_tol=bvp_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(job, range(len(fams))))
    else:
        entries = [job(k) for k in range(len(fams))]
    return {
        "seed": seed,
        "thresholds": {"fisher_rel": fisher_tol, "bvp_rel": bvp_tol,
                       "points": n_points, "pairs": n_pairs, "knots": knots},
        "families": entries,
        "pass": all(e["pass"] for e in entries),
    }
