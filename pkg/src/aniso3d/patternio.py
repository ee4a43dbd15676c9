"""Plain-text point pattern files and CSV table output.

Pattern files are toolchain-neutral text: comment lines start with '#',
the first data line is ``window x_lo x_hi y_lo y_hi z_lo z_hi``, and each
following line holds one ``x y z`` point.  Floats are written with
round-trip precision, so write-then-read reproduces coordinates exactly.
"""

import os

import numpy as np

from .simulate import BoxWindow, PointPattern

__all__ = ["write_pattern", "read_pattern", "read_patterns", "write_csv"]


def _fmt(value: float) -> str:
    return repr(float(value))


def write_pattern(path, pattern: PointPattern, comments=()) -> None:
    """Write one pattern; ``comments`` become leading '#' lines."""
    w = pattern.window
    lines = [f"# {c}" for c in comments]
    bounds = " ".join(
        f"{_fmt(w.lo[i])} {_fmt(w.hi[i])}" for i in range(3)
    )
    lines.append(f"window {bounds}")
    lines.extend(" ".join(_fmt(c) for c in p) for p in pattern.points)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_pattern(path) -> PointPattern:
    """Read one pattern file, reporting the line number of any bad content."""
    window = None
    points = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if window is None:
                if fields[0] != "window" or len(fields) != 7:
                    raise ValueError(
                        f"{path}:{lineno}: expected 'window x_lo x_hi y_lo y_hi "
                        f"z_lo z_hi', got {line!r}"
                    )
                try:
                    vals = [float(v) for v in fields[1:]]
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: malformed window bounds {line!r}")
                window = BoxWindow(np.array(vals[0::2]), np.array(vals[1::2]))
                continue
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'x y z', got {line!r}")
            try:
                points.append([float(v) for v in fields])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed coordinates {line!r}")
    if window is None:
        raise ValueError(f"{path}: missing window line")
    return PointPattern(np.array(points) if points else np.empty((0, 3)), window)


def read_patterns(source) -> list:
    """Read every pattern under a directory (sorted) or from explicit paths."""
    if isinstance(source, (str, os.PathLike)) and os.path.isdir(source):
        names = sorted(
            n for n in os.listdir(source)
            if n.endswith(".txt") and not n.startswith("manifest")
        )
        if not names:
            raise ValueError(f"no pattern files (*.txt) found in {source}")
        paths = [os.path.join(source, n) for n in names]
    elif isinstance(source, (str, os.PathLike)):
        paths = [source]
    else:
        paths = list(source)
    return [read_pattern(p) for p in paths]


def write_csv(path, header, rows, comments=()) -> None:
    """Self-describing CSV: '#' comment lines, a header row, then data.

    Floats are written with round-trip precision so identical runs give
    byte-identical files.
    """
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
