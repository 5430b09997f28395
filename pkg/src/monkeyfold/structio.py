"""PDB C-alpha traces in and out, and CSV reports."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field

import numpy as np


class PDBParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass
class TargetStructure:
    id: str
    chain: str
    calpha: np.ndarray
    residue_names: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.calpha)


def _read_text(src):
    if hasattr(src, "read"):
        return src.read()
    if isinstance(src, os.PathLike) or (isinstance(src, str) and "\n" not in src and os.path.exists(src)):
        with open(src) as fh:
            return fh.read()
    return src


def parse_pdb_calpha(text, chain=None, id=""):
    """Extract the C-alpha trace of one chain from PDB text.

    Only the first model is read. ``ATOM`` records named ``CA`` with a blank
    or ``A`` alternate location are kept in file order; ``HETATM`` records
    are ignored. ``chain=None`` selects the first chain that has a C-alpha.
    ``text`` may also be a path or an open file.
    """
    text = _read_text(text)
    coords, names, chains_seen = [], [], []
    seen_res = set()
    in_model = False
    models = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        rec = line[:6]
        if rec.startswith("MODEL"):
            models += 1
            if models > 1:
                break
            in_model = True
            continue
        if rec.startswith("ENDMDL"):
            if in_model:
                break
            continue
        if rec != "ATOM  ":
            continue
        if len(line) < 54:
            raise PDBParseError("ATOM record shorter than 54 columns", lineno)
        if line[12:16].strip() != "CA":
            continue
        altloc = line[16]
        if altloc not in (" ", "A"):
            continue
        ch = line[21]
        if ch not in chains_seen:
            chains_seen.append(ch)
        if chain is None:
            chain = ch
        if ch != chain:
            continue
        try:
            xyz = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
            resseq = (int(line[22:26]), line[26])
        except ValueError:
            raise PDBParseError("malformed coordinate or residue number field", lineno) from None
        if not all(math.isfinite(v) for v in xyz):
            raise PDBParseError("non-finite coordinate", lineno)
        if resseq in seen_res:
            raise PDBParseError(f"duplicate CA for residue {resseq[0]}{resseq[1].strip()}", lineno)
        seen_res.add(resseq)
        coords.append(xyz)
        names.append(line[17:20].strip())
    if not coords:
        if chain is not None and chains_seen and chain not in chains_seen:
            raise PDBParseError(f"chain {chain!r} not found (chains: {''.join(chains_seen)})")
        raise PDBParseError("no C-alpha atoms found" + (f" in chain {chain!r}" if chain else ""))
    return TargetStructure(id, chain, np.array(coords, dtype=float), names)


def write_pdb(X, out=None, resname="ALA", chain="A"):
    """Format a C-alpha trace as PDB ``ATOM`` records followed by TER and END.

    Returns the text; also writes it when ``out`` is a path or file object.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ValueError(f"conformation must have shape (n, 3), got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("cannot write non-finite coordinates")
    lines = []
    for i, (x, y, z) in enumerate(X, start=1):
        lines.append(
            f"ATOM  {i:5d}  CA  {resname:>3s} {chain}{i:4d}    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}{1.0:6.2f}{0.0:6.2f}          {'C':>2s}"
        )
    n = len(X)
    lines.append(f"TER   {n + 1:5d}      {resname:>3s} {chain}{n:4d}")
    lines.append("END")
    text = "\n".join(lines) + "\n"
    _write(out, text)
    return text


def _write(out, text):
    if out is None:
        return
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


REPORT_FIELDS = ["conformation", "weights", "objective", "f1", "f2", "f3", "thickness", "helix_triplets"]


@dataclass
class ReportRow:
    conformation: str
    weights: tuple
    objective: float
    f1: float
    f2: float
    f3: float
    thickness: float
    helix_triplets: int
    rmsd: dict = field(default_factory=dict)  # target id -> value or None


def _num(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return f"{v:.4f}" if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")


def write_report(rows, targets, out=None):
    """CSV with one row per conformation: the fixed fields of
    :data:`REPORT_FIELDS` followed by one ``rmsd_<target>`` column per target.
    Missing RMSD values (length mismatch) are left empty."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_FIELDS + [f"rmsd_{t}" for t in targets])
    for r in rows:
        w.writerow(
            [
                r.conformation,
                "/".join(f"{g:.4f}" for g in r.weights) if r.weights else "",
                _num(r.objective),
                _num(r.f1),
                _num(r.f2),
                _num(r.f3),
                _num(r.thickness),
                _num(r.helix_triplets),
            ]
            + [_num(r.rmsd.get(t)) for t in targets]
        )
    text = buf.getvalue()
    _write(out, text)
    return text
