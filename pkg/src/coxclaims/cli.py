"""Command-line front end: a thin HTTP client of the service.

By default commands run against an in-process instance of the FastAPI
app (no server needed); ``--server URL`` targets a running instance
instead. Exit codes: 0 success, 2 config error, 3 precondition
violation, 4 accuracy failure.
"""

import json
import sys

import click
import httpx

from .service.app import app as service_app


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    return TestClient(service_app)


def _load_config(path: str, seed: int | None) -> dict:
    if path is None:
        raise click.ClickException("--config is required")
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(2)
    except json.JSONDecodeError as exc:
        click.echo(f"error: config is not valid JSON: {exc}", err=True)
        sys.exit(2)
    if seed is not None:
        config["seed"] = seed
    return config


def _post(client: httpx.Client, path: str, payload: dict) -> httpx.Response:
    resp = client.post(path, json=payload)
    if resp.status_code == 400:
        detail = resp.json().get("detail", {})
        code = detail.get("exit_code", 2)
        click.echo(f"error: {detail.get('message', 'request failed')}", err=True)
        sys.exit(code)
    if resp.status_code == 422:
        try:
            problems = ", ".join(
                ".".join(str(p) for p in item["loc"][1:]) + ": " + item["msg"]
                for item in resp.json()["detail"]
            )
        except (KeyError, ValueError, TypeError):
            problems = resp.text
        click.echo(f"error: invalid request ({problems})", err=True)
        sys.exit(2)
    resp.raise_for_status()
    return resp


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@click.group()
@click.option("--config", "config_path", type=click.Path(), help="Run config JSON file.")
@click.option("--seed", type=int, default=None, help="Seed override for stochastic commands.")
@click.option("--out", type=click.Path(), default=None, help="Output file (default stdout).")
@click.option("--server", default=None, help="URL of a running service (default: in-process).")
@click.pass_context
def main(ctx, config_path, seed, out, server):
    """Marked Cox claim model: simulation and count-distribution analytics."""
    ctx.ensure_object(dict)
    ctx.obj.update(config_path=config_path, seed=seed, out=out, server=server)


@main.command()
@click.option("--k", type=int, default=None, help="Horizon in periods (default: full grid).")
@click.option("--replications", type=int, default=1, show_default=True)
@click.pass_context
def simulate(ctx, k, replications):
    """Simulate claim sets; CSV with a replication column."""
    config = _load_config(ctx.obj["config_path"], ctx.obj["seed"])
    with _client(ctx.obj["server"]) as client:
        resp = _post(client, "/simulate", {"config": config, "k": k, "replications": replications})
    _emit(resp.text, ctx.obj["out"])


@main.command()
@click.option(
    "--which",
    type=click.Choice(["reported", "ibnr", "period-marginal"]),
    default="reported",
    show_default=True,
)
@click.option("--period", type=int, default=1, help="Period for --which period-marginal.")
@click.option("--n-max", type=int, default=None, help="Largest tabulated count.")
@click.option("--eps", type=float, default=1e-6, show_default=True, help="Tail-bound budget.")
@click.option("--mc", type=int, default=None, help="Monte Carlo fallback replications.")
@click.option("--verify", is_flag=True, help="Cross-check against Monte Carlo.")
@click.pass_context
def dist(ctx, which, period, n_max, eps, mc, verify):
    """Reported/IBNR total or period-marginal pmf as CSV."""
    config = _load_config(ctx.obj["config_path"], ctx.obj["seed"])
    payload = {
        "config": config,
        "which": which,
        "period": period,
        "n_max": n_max,
        "eps": eps,
        "mc": mc,
        "verify": verify,
    }
    with _client(ctx.obj["server"]) as client:
        resp = _post(client, "/dist", payload)
    _emit(resp.text, ctx.obj["out"])


@main.command()
@click.option("--max-lag", type=int, default=10, show_default=True)
@click.pass_context
def acf(ctx, max_lag):
    """Stationary autocorrelation table as CSV."""
    config = _load_config(ctx.obj["config_path"], ctx.obj["seed"])
    with _client(ctx.obj["server"]) as client:
        resp = _post(client, "/acf", {"config": config, "max_lag": max_lag})
    _emit(resp.text, ctx.obj["out"])


@main.command()
@click.option(
    "--which", type=click.Choice(["reported", "ibnr"]), default="reported", show_default=True
)
@click.option("--replications", type=int, default=100_000, show_default=True)
@click.option("--eps", type=float, default=1e-6, show_default=True)
@click.pass_context
def verify(ctx, which, replications, eps):
    """Cross-check the closed-form total count law against Monte Carlo."""
    config = _load_config(ctx.obj["config_path"], ctx.obj["seed"])
    payload = {"config": config, "which": which, "replications": replications, "eps": eps}
    with _client(ctx.obj["server"]) as client:
        resp = _post(client, "/verify", payload)
    report = resp.json()
    _emit(json.dumps(report, indent=2) + "\n", ctx.obj["out"])
    if not report["passed"]:
        sys.exit(4)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("coxclaims.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
