"""Prompt template catalog.

Templates are plain text files with ``${name}`` placeholders, shipped as
package data and overridable via a directory of same-named files.  Rendering
substitutes every placeholder or fails loudly; output never contains an
unsubstituted marker.
"""

from __future__ import annotations

import string
from importlib import resources
from pathlib import Path

TEMPLATE_IDS = (
    "pun-header",
    "pun-nk-exemplar",
    "pun-question",
    "fb-syntax",
    "fb-kb-inconsistency",
    "fb-qlf-disagreement",
    "fb-empty-answer",
    "fb-intermediate-node",
    "fb-answer-entity",
    "v3-naturalize",
    "v3-backtranslate",
    "v3-equivalence",
    "scun-select",
)


class UnknownTemplate(Exception):
    pass


class UnboundPlaceholder(Exception):
    pass


_cache: dict[tuple[str | None, str], str] = {}


def template_text(template_id: str, templates_dir: str | None = None) -> str:
    """Raw template text, from the override directory or the package data."""
    if template_id not in TEMPLATE_IDS:
        raise UnknownTemplate(f"no template named {template_id!r}")
    key = (templates_dir, template_id)
    if key in _cache:
        return _cache[key]
    if templates_dir is not None:
        override = Path(templates_dir) / f"{template_id}.txt"
        if override.exists():
            text = override.read_text(encoding="utf-8")
            _cache[key] = text
            return text
    text = (resources.files("kbqa_repair") / "templates" / f"{template_id}.txt").read_text(
        encoding="utf-8"
    )
    _cache[key] = text
    return text


def render_prompt(template_id: str, bindings: dict | None = None, templates_dir: str | None = None) -> str:
    """Render a template with every placeholder substituted."""
    text = template_text(template_id, templates_dir)
    try:
        return string.Template(text).substitute(bindings or {})
    except KeyError as err:
        raise UnboundPlaceholder(f"template {template_id} placeholder {err.args[0]!r} is unbound") from err
    except ValueError as err:
        raise UnboundPlaceholder(f"template {template_id}: {err}") from err
