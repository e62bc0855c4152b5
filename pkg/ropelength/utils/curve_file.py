"""Plain-text curve file reader and writer.

Format::

    RLPOLY 1
    components <k>
    component <closed|open> <vertex-count>
    <x> <y> <z>
    ...

Blank lines and lines starting with ``#`` are ignored.  Coordinates are
written in the shortest form that reads back to the same double.
"""
from __future__ import annotations

from pathlib import Path
from typing import Iterator, List, Optional, Tuple

from pydantic import ValidationError

from ropelength.core.exceptions import CurveFileError
from ropelength.core.logging import get_logger
from ropelength.schemas.curve import Component, PolyCurve, Vec3

logger = get_logger(__name__)

MAGIC = "RLPOLY"
VERSION = "1"


def _content_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped.split()


def _count(token: str, line: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise CurveFileError(f"{what} must be an integer, got {token!r}", line=line)
    if value < 1:
        raise CurveFileError(f"{what} must be positive, got {value}", line=line)
    return value


def parse_curve(text: str) -> PolyCurve:
    """Parse curve-file *text*.

    Raises:
        CurveFileError: On any syntax error or invalid component, with
            the offending line number.
    """
    lines = _content_lines(text)

    def expect(what: str) -> Tuple[int, List[str]]:
        try:
            return next(lines)
        except StopIteration:
            raise CurveFileError(f"unexpected end of file, expected {what}")

    number, fields = expect("header")
    if fields != [MAGIC, VERSION]:
        raise CurveFileError(f"expected header '{MAGIC} {VERSION}'", line=number)

    number, fields = expect("component count")
    if len(fields) != 2 or fields[0] != "components":
        raise CurveFileError("expected 'components <k>'", line=number)
    total = _count(fields[1], number, "component count")

    components: List[Component] = []
    for _ in range(total):
        header_line, fields = expect("component header")
        if len(fields) != 3 or fields[0] != "component" or fields[1] not in ("closed", "open"):
            raise CurveFileError(
                "expected 'component <closed|open> <vertex-count>'", line=header_line
            )
        closed = fields[1] == "closed"
        count = _count(fields[2], header_line, "vertex count")
        vertices: List[Vec3] = []
        for _ in range(count):
            number, fields = expect("vertex")
            if len(fields) != 3:
                raise CurveFileError(
                    f"expected 3 coordinates, got {len(fields)}", line=number
                )
            try:
                vertices.append(Vec3(*(float(f) for f in fields)))
            except ValueError:
                raise CurveFileError("coordinate is not a number", line=number)
        try:
            components.append(Component(vertices=vertices, closed=closed))
        except ValidationError as exc:
            reason = exc.errors()[0]["msg"]
            raise CurveFileError(f"invalid component: {reason}", line=header_line)

    extra: Optional[Tuple[int, List[str]]] = next(lines, None)
    if extra is not None:
        raise CurveFileError("unexpected content after last component", line=extra[0])
    return PolyCurve(components=components)


def format_curve(curve: PolyCurve) -> str:
    """Serialize *curve* in curve-file format."""
    out = [f"{MAGIC} {VERSION}", f"components {len(curve.components)}"]
    for component in curve.components:
        kind = "closed" if component.closed else "open"
        out.append(f"component {kind} {len(component.vertices)}")
        out.extend(" ".join(repr(float(c)) for c in v) for v in component.vertices)
    return "\n".join(out) + "\n"


def read_curve(path: str | Path) -> PolyCurve:
    """Read a curve file.

    Raises:
        CurveFileError: If the file cannot be read or parsed.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CurveFileError(f"cannot read {path}: {exc.strerror}")
    curve = parse_curve(text)
    logger.debug("curve_file.read", path=str(path), edges=curve.edge_count)
    return curve


def write_curve(curve: PolyCurve, path: str | Path) -> None:
    """Write *curve* to *path*.

    Raises:
        CurveFileError: If the file cannot be written.
    """
    try:
        Path(path).write_text(format_curve(curve), encoding="utf-8")
    except OSError as exc:
        raise CurveFileError(f"cannot write {path}: {exc.strerror}")
    logger.debug("curve_file.written", path=str(path), edges=curve.edge_count)
