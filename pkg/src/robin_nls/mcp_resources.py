"""
Robin NLS MCP Resources - read-only views of stored profiles via URI templates.

Tables and spectra are computed on first access and cached in the store.
"""

from .mcp_tools import mcp
from .serialization import dumps_json, spectrum_document, table_csv
from .state import store


@mcp.resource("robin://profiles")
async def list_profiles_resource() -> str:
    """All loaded profiles with their cached results."""
    profiles = store.list_profiles()
    if not profiles:
        return "No profiles loaded. Use the load_profile tool first."
    output = [f"**Loaded profiles ({len(profiles)} total)**"]
    for p in profiles:
        cached = [name for name, flag in (("table", p["has_table"]), ("spectrum", p["has_spectrum"])) if flag]
        output.append(
            f"├─ {p['id']} | {p['source']:18s} | lambda = {p['lambda']:+d} | q = {p['q']:.6g} | "
            f"N = {p['N']} | cached: {', '.join(cached) or 'none'}"
        )
    return "\n".join(output)


@mcp.resource("robin://profiles/{profile_id}/table")
async def table_resource(profile_id: str) -> str:
    """Spectral table as CSV (k, a, b, Delta, r)."""
    try:
        return table_csv(store.ensure_table(profile_id))
    except Exception as e:
        return f"Error: {str(e)}"


@mcp.resource("robin://profiles/{profile_id}/spectrum")
async def spectrum_resource(profile_id: str) -> str:
    """Discrete spectrum as JSON {M, zeros: [{xi, c, simple}]}."""
    try:
        return dumps_json(spectrum_document(store.ensure_spectrum(profile_id)))
    except Exception as e:
        return f"Error: {str(e)}"
