import json
from typing import List, Optional

from mcp.server.fastmcp import FastMCP

from .asymptotics import ReflectionCoefficient, classify_regime, predict
from .pde import evolve, initial_state
from .profiles import from_generator
from .serialization import parse_profile, profile_from_document
from .solitons import SolitonParams
from .state import store

# Define the server
mcp = FastMCP("Robin NLS Toolkit")


@mcp.tool()
async def load_profile(generator: Optional[str] = None, params_json: str = "{}", profile_json: Optional[str] = None) -> str:
    """
    Load an initial profile u0 on the half-line and return its id.
    Pass either a generator name (defocusing_soliton, focusing_soliton, gaussian) with
    parameters as a JSON object, or a full profile document
    {"lambda": ±1, "q": .., "grid": {"h": .., "N": ..}, "data": [[re, im], ...]}.
    """
    try:
        if (generator is None) == (profile_json is None):
            return "Error: Give exactly one of generator or profile_json."
        if generator is not None:
            profile = from_generator(generator, json.loads(params_json), store.tolerances)
            source = generator
        else:
            profile = profile_from_document(parse_profile(profile_json), store.tolerances)
            source = "document"
        profile_id = store.add_profile(profile, source)
        return (
            f"**Profile loaded** (id: {profile_id})\n"
            f"├─ Source: {source}\n"
            f"├─ lambda = {profile.lam}, q = {profile.q:.10g}\n"
            f"└─ {profile.N} samples, h = {profile.h:g}, L = {profile.L:g}"
        )
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
async def scatter_profile(profile_id: str, k_max: float = 8.0, n_k: int = 513) -> str:
    """
    Compute the spectral table (a, b, Delta, r) of a loaded profile on [-k_max, k_max].
    The full table is available as the resource robin://profiles/{id}/table.
    """
    try:
        table = store.ensure_table(profile_id, k_max, n_k)
        checks = table.checks
        output = [
            f"**Spectral table for {profile_id}** ({table.k_grid.size} nodes)",
            f"├─ max |r| = {checks['max_abs_r']:.3e}",
            f"├─ unit relation residual = {checks['unit_residual']:.3e}",
            f"├─ Delta symmetry residual = {checks['symmetry_residual']:.3e}",
            f"└─ violations: {len(table.violations)}",
        ]
        output.extend(f"   - {v}" for v in table.violations)
        return "\n".join(output)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
async def find_discrete_spectrum(profile_id: str) -> str:
    """Count and locate the zeros of Delta in the upper half-plane and their residue constants."""
    try:
        spectrum = store.ensure_spectrum(profile_id)
        if spectrum.M == 0:
            return f"**No discrete spectrum** for {profile_id} (pure radiation)."
        output = [f"**Discrete spectrum for {profile_id}** (M = {spectrum.M})"]
        for j, xi in enumerate(spectrum.xi):
            c = spectrum.c[j] if spectrum.c else None
            branch = "└─" if j == spectrum.M - 1 else "├─"
            output.append(f"{branch} xi = {xi:.10g}" + (f" | c = {c:.10g}" if c is not None else ""))
        if spectrum.dropped:
            output.append(f"Dropped (common zero of a and Delta): {', '.join(f'{z:.8g}' for z in spectrum.dropped)}")
        return "\n".join(output)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
async def soliton_summary(lam: int, omega: float, phi: Optional[float] = None, alpha: Optional[float] = None) -> str:
    """Closed-form data of a stationary soliton: q, boundary value, pole and residue constant."""
    try:
        params = SolitonParams(lam=lam, omega=omega, phi=phi, alpha=alpha)
        kind = "focusing" if lam == -1 else "defocusing"
        return (
            f"**Stationary {kind} soliton** (omega = {omega:g})\n"
            f"├─ q = {params.q_s:.12g}\n"
            f"├─ u_s0(0) = {params.boundary_value:.12g}\n"
            f"├─ xi1 = {params.xi1:.12g}\n"
            f"└─ c1 = {params.c1:.12g}"
        )
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
async def predict_asymptotics(profile_id: str, t: float, x_list: List[float], K: Optional[float] = None) -> str:
    """
    Long-time asymptotic prediction u(x, t) for a loaded profile.
    The regime follows from lambda and the sign of q; K is the focusing velocity window.
    """
    try:
        entry = store.get(profile_id)
        table = store.ensure_table(profile_id)
        spectrum = store.ensure_spectrum(profile_id)
        regime = classify_regime(entry.profile.lam, entry.profile.q)
        reflection = ReflectionCoefficient.from_table(table, store.tolerances)
        profiles = predict(regime, reflection, spectrum, x_list, t, K=K, tol=store.tolerances)
        output = [f"**Asymptotics ({regime}) at t = {t:g}**"]
        for p in profiles:
            output.append(
                f"├─ x = {p.x:8.4f} | u = {p.total.real:+.6e} {p.total.imag:+.6e}i | "
                f"|u| = {abs(p.total):.6e} | soliton {abs(p.u_sol):.3e}"
            )
        return "\n".join(output)
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.tool()
async def evolve_profile(profile_id: str, t_final: float, dx: float = 0.05, dt: float = 0.01) -> str:
    """Run the Crank-Nicolson solver to t_final and report conservation and the boundary value."""
    try:
        entry = store.get(profile_id)
        state = initial_state(entry.profile, dx, dt, t_final)
        trajectory = evolve(state, t_final, tol=store.tolerances)
        last = trajectory.log[-1]
        final = trajectory.final
        return (
            f"**Evolved {profile_id} to t = {last.t:g}** (L_sim = {final.L_sim:g})\n"
            f"├─ mass = {last.mass:.10g} (drift {last.mass_drift:.2e})\n"
            f"├─ energy = {last.energy:.10g} (drift {last.energy_drift:.2e})\n"
            f"├─ u(0, t) = {last.boundary:.8g}\n"
            f"└─ max |u| = {float(abs(final.u).max()):.8g}"
        )
    except Exception as e:
        return f"Error: {str(e)}"
