"""Text and JSON formats for truth tables and other artifacts."""

import json
from pathlib import Path

from .core import BooleanFunction, N_MAX
from .errors import BadParams, SizeLimit


def parse_truth_table(text: str) -> BooleanFunction:
    """Parse ``n=<k>`` followed by a 0/1 string or a hex string.

    A binary body has ``2**k`` characters, character ``i`` being table bit
    ``i``. A hex body is the big-endian integer whose bit ``i`` is table bit
    ``i``; a ``0x`` prefix forces hex when lengths would be ambiguous.
    Whitespace inside the body is ignored.
    """
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or not lines[0].replace(" ", "").startswith("n="):
        raise BadParams("truth table must start with a header line 'n=<k>'")
    try:
        n = int(lines[0].replace(" ", "")[2:])
    except ValueError:
        raise BadParams(f"bad header {lines[0]!r}") from None
    if n < 0:
        raise BadParams("variable count must be non-negative")
    if n > N_MAX:
        raise SizeLimit(f"n={n} exceeds the cap of {N_MAX} variables")
    body = "".join("".join(lines[1:]).split())
    size = 1 << n
    if body.lower().startswith("0x"):
        return _from_hex(n, body[2:])
    if len(body) == size and set(body) <= {"0", "1"}:
        return BooleanFunction(n, [int(ch) for ch in body])
    if len(body) == max(1, size // 4):
        return _from_hex(n, body)
    raise BadParams(f"body has {len(body)} characters; expected {size} binary digits or {max(1, size // 4)} hex digits")


def _from_hex(n, digits):
    try:
        value = int(digits, 16)
    except ValueError:
        raise BadParams(f"invalid hex table {digits[:16]!r}") from None
    return BooleanFunction.from_int(n, value)


def format_truth_table(f: BooleanFunction, hex_body: bool | None = None) -> str:
    if hex_body is None:
        hex_body = f.n >= 6
    body = f.to_hex() if hex_body and f.n >= 2 else "".join(str(int(b)) for b in f.bits)
    return f"n={f.n}\n{body}\n"


def read_truth_table(path) -> BooleanFunction:
    return parse_truth_table(Path(path).read_text())


def write_truth_table(f: BooleanFunction, path) -> None:
    Path(path).write_text(format_truth_table(f))


def load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise BadParams(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
