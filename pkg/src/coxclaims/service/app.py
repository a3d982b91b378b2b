"""FastAPI service exposing the simulation and analytics pipelines.

Tabular results are returned as ``text/csv`` bodies (the same renderings
the library produces), so clients can persist them byte-for-byte.
Errors carry a JSON detail ``{"exit_code": ..., "message": ...}`` where
the exit code follows the CLI convention: 2 config, 3 precondition,
4 accuracy.
"""

import functools

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .. import __version__, pascal, validation
from ..errors import (
    AccuracyError,
    ConfigError,
    ModelError,
    PreconditionError,
    SpectralUnsupportedError,
    UnsupportedChainError,
)
from ..simulate import CSV_HEADER, simulate
from .schemas import (
    AcfRequest,
    DistRequest,
    HealthResponse,
    SimulateRequest,
    VerifyReport,
    VerifyRequest,
)

app = FastAPI(title="coxclaims", version=__version__)


def _exit_code(exc: ModelError) -> int:
    if isinstance(exc, AccuracyError):
        return 4
    if isinstance(exc, (PreconditionError, UnsupportedChainError, SpectralUnsupportedError)):
        return 3
    return 2


def _translate_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ModelError as exc:
            raise HTTPException(
                status_code=400,
                detail={"exit_code": _exit_code(exc), "message": str(exc)},
            )

    return wrapper


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(version=__version__)


@app.post("/simulate", response_class=PlainTextResponse)
@_translate_errors
def simulate_endpoint(req: SimulateRequest) -> PlainTextResponse:
    """Simulate claim sets; one CSV with a ``replication`` column."""
    spec = req.config.build_spec()
    delay = req.config.build_delay()
    rng = req.config.make_rng()
    k = req.k if req.k is not None else spec.grid_index(req.config.resolved_valuation(spec))
    if k < 1:
        raise ConfigError(f"horizon must be >= 1, got {k}")
    if req.replications < 1:
        raise ConfigError(f"replications must be >= 1, got {req.replications}")
    lines = ["replication," + CSV_HEADER]
    for rep in range(req.replications):
        claims = simulate(spec, delay, k, rng)
        lines.extend(
            f"{rep},{r.arrival:.12g},{r.delay:.12g},{r.report_time:.12g},{r.period}"
            for r in claims.records
        )
    return PlainTextResponse("\n".join(lines) + "\n", media_type="text/csv")


def _mc_law_csv(mc: validation.McCountPmf, tail_fraction: float) -> str:
    lines = ["n,probability"]
    lines.extend(f"{n},{p:.12g}" for n, p in enumerate(mc.pmf))
    lines.append(f"# tail_bound={tail_fraction:.12g}")
    lines.append(f"# method=monte-carlo replications={mc.replications}")
    return "\n".join(lines) + "\n"


@app.post("/dist", response_class=PlainTextResponse)
@_translate_errors
def dist_endpoint(req: DistRequest) -> PlainTextResponse:
    """Reported/IBNR total or period-marginal pmf as CSV with tail bound."""
    spec = req.config.build_spec()
    if req.which == "period-marginal":
        law = pascal.marginal_count_law(spec, req.period, eps=req.eps, n_max=req.n_max)
        return PlainTextResponse(law.to_csv(), media_type="text/csv")
    delay = req.config.build_delay()
    tau = req.config.resolved_valuation(spec)
    extra_comments = []
    try:
        law = pascal.total_count_law(
            spec, delay, tau, req.which, eps=req.eps, n_max=req.n_max
        )
        body = law.to_csv()
        table = law.pmf
    except AccuracyError:
        if req.mc is None:
            raise
        rng = req.config.make_rng()
        mc = validation.mc_count_pmf(spec, delay, tau, req.which, req.mc, rng, n_max=req.n_max)
        tail_fraction = max(0.0, 1.0 - float(mc.pmf.sum()))
        body = _mc_law_csv(mc, tail_fraction)
        table = mc.pmf
    if req.verify:
        rng = req.config.make_rng()
        mc = validation.mc_count_pmf(
            spec, delay, tau, req.which, req.verify_replications, rng, n_max=len(table) - 1
        )
        z = _max_abs_z(table, mc)
        extra_comments.append(f"# verify={'pass' if z <= 4.0 else 'fail'} max_abs_z={z:.4g}")
        if z > 4.0:
            raise AccuracyError(
                f"Monte Carlo cross-check failed: max |z| = {z:.3g} > 4"
            )
    if extra_comments:
        body = body + "\n".join(extra_comments) + "\n"
    return PlainTextResponse(body, media_type="text/csv")


def _max_abs_z(exact: np.ndarray, mc: validation.McCountPmf) -> float:
    """Largest per-bin |empirical - exact| in binomial standard errors.

    Standard errors use the exact bin probabilities; bins with fewer than
    five expected observations are skipped.
    """
    n = min(exact.size, mc.pmf.size)
    reps = mc.replications
    z = 0.0
    for i in range(n):
        expected = exact[i] * reps
        if expected < 5.0:
            continue
        se = np.sqrt(exact[i] * (1.0 - exact[i]) / reps)
        z = max(z, abs(exact[i] - mc.pmf[i]) / se)
    return float(z)


@app.post("/acf", response_class=PlainTextResponse)
@_translate_errors
def acf_endpoint(req: AcfRequest) -> PlainTextResponse:
    """Autocorrelation table, spectral path with direct fallback."""
    spec = req.config.build_spec()
    if req.max_lag < 1:
        raise ConfigError(f"max_lag must be >= 1, got {req.max_lag}")
    method = "spectral"
    try:
        rhos = [pascal.acf(spec, k) for k in range(1, req.max_lag + 1)]
    except SpectralUnsupportedError:
        method = "direct"
        var = pascal.covariance(spec, 0)
        rhos = [pascal.covariance(spec, k) / var for k in range(1, req.max_lag + 1)]
    lines = ["k,rho"]
    lines.extend(f"{k},{rho:.12g}" for k, rho in enumerate(rhos, start=1))
    lines.append(f"# method={method}")
    return PlainTextResponse("\n".join(lines) + "\n", media_type="text/csv")


@app.post("/verify", response_model=VerifyReport)
@_translate_errors
def verify_endpoint(req: VerifyRequest) -> VerifyReport:
    """Cross-check the closed-form total count law against Monte Carlo."""
    spec = req.config.build_spec()
    delay = req.config.build_delay()
    tau = req.config.resolved_valuation(spec)
    law = pascal.total_count_law(spec, delay, tau, req.which, eps=req.eps)
    rng = req.config.make_rng()
    mc = validation.mc_count_pmf(
        spec, delay, tau, req.which, req.replications, rng, n_max=law.n_max
    )
    z = _max_abs_z(law.pmf, mc)
    return VerifyReport(
        which=req.which,
        replications=req.replications,
        bins_checked=min(law.pmf.size, mc.pmf.size),
        max_abs_z=z,
        passed=bool(z <= 4.0),
    )
