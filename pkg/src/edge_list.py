from generators import InsertionSequence


class EdgeListFormatError(Exception):
    def __init__(self, path, line_no, reason) -> None:
        super().__init__(f"{path}:{line_no}: {reason}")


def format_edge_list(sequence: InsertionSequence, comments: list[str] | None = None) -> str:
    lines = [f"# {comment}" for comment in comments or []]
    lines.append(f"n {sequence.n}")
    lines.extend(f"{u} {v}" for u, v in sequence.arcs)
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str, path: str = "<string>") -> InsertionSequence:
    """
    Parse `n <count>` followed by one `u v` arc per line.

    Blank lines and lines starting with `#` are skipped anywhere.
    """
    n = None
    arcs = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue

        fields = line.split()
        if n is None:
            if len(fields) != 2 or fields[0] != "n":
                raise EdgeListFormatError(path, line_no, f"expected 'n <count>', got '{line}'")
            n = _parse_id(fields[1], path, line_no)
            continue

        if len(fields) != 2:
            raise EdgeListFormatError(path, line_no, f"expected 'u v', got '{line}'")

        u, v = (_parse_id(token, path, line_no) for token in fields)
        for w in (u, v):
            if w >= n:
                raise EdgeListFormatError(path, line_no, f"vertex {w} out of range for n={n}")
        arcs.append((u, v))

    if n is None:
        raise EdgeListFormatError(path, 0, "missing 'n <count>' header")

    return InsertionSequence(n, arcs)


def _parse_id(token: str, path, line_no) -> int:
    if not token.isdecimal():
        raise EdgeListFormatError(path, line_no, f"'{token}' is not a non-negative integer")
    return int(token)


def read_edge_list(path: str) -> InsertionSequence:
    with open(path, "r", encoding="utf-8") as f:
        return parse_edge_list(f.read(), path)


def write_edge_list(sequence: InsertionSequence, path: str, comments: list[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_edge_list(sequence, comments))
