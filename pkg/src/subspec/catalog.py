"""Built-in example substitutions addressable as catalog:NAME on the CLI."""

from __future__ import annotations

from .errors import RuleError
from .substitution import Substitution, parse_substitution

_STATIC: dict[str, str] = {
    "thue-morse": "0 -> 0 1\n1 -> 1 0\n",
    "fibonacci": "0 -> 0 1\n1 -> 0\n",
    "rudin-shapiro": (
        "alphabet = 0 1 0b 1b\n"
        "0 -> 0 1\n"
        "1 -> 0 1b\n"
        "0b -> 0b 1b\n"
        "1b -> 0b 1\n"
    ),
    "period-doubling": "0 -> 0 1\n1 -> 0 0\n",
    "bijective-3": "0 -> 0 1 0\n1 -> 1 2 2\n2 -> 2 0 1\n",
    "non-pisot-0111": "0 -> 0 1 1 1\n1 -> 0\n",
}

CATALOG_NAMES = tuple(_STATIC) + ("family-01k",)


def catalog_source(name: str) -> str:
    """Rule source of a catalog entry; family-01k takes ?k=N (k >= 1)."""
    base, _, query = name.partition("?")
    if base in _STATIC:
        if query:
            raise RuleError(f"catalog entry {base!r} takes no parameters")
        return _STATIC[base]
    if base == "family-01k":
        params = dict(kv.split("=", 1) for kv in query.split("&") if "=" in kv) if query else {}
        try:
            k = int(params.get("k", "4"))
        except ValueError:
            raise RuleError(f"bad parameter for family-01k: {query!r}") from None
        if k < 1:
            raise RuleError("family-01k requires k >= 1")
        return "0 -> 0 " + " ".join("1" * k) + "\n1 -> 0\n"
    raise RuleError(f"unknown catalog entry {base!r}; known: {', '.join(CATALOG_NAMES)}")


def catalog_substitution(name: str) -> Substitution:
    return parse_substitution(catalog_source(name))
