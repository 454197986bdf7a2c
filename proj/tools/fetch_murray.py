#!/usr/bin/env python3
"""Fetch the Murray smelter site dataset and write it as tests/data/murray.csv.

The dataset (253 soil samples with arsenic and lead concentrations on a
non-regular grid) ships as `data/murray.rda` inside the SpatialPack R package
on CRAN. This script downloads the package tarball, extracts the .rda, decodes
R's serialization format (RData version 2/3, XDR), and writes a CSV with the
header `s1,s2,x,y` (coordinates, As, Pb) that the acceptance gate and the CLI
consume directly.

Only the Python standard library is used. If your environment has no network
access, download any SpatialPack source tarball elsewhere and pass it with
--tarball, or pass the extracted murray.rda with --rda.

    python3 tools/fetch_murray.py                 # download from CRAN
    python3 tools/fetch_murray.py --tarball SpatialPack_0.4-1.tar.gz
    python3 tools/fetch_murray.py --rda murray.rda --out tests/data/murray.csv
    python3 tools/fetch_murray.py --self-test     # parser round-trip, no network
"""

from __future__ import annotations

import argparse
import bz2
import gzip
import io
import lzma
import math
import re
import struct
import sys
import tarfile
import urllib.error
import urllib.request
from pathlib import Path

# Known CRAN locations, newest first. The archive URLs cover the case where a
# newer release has displaced these versions from src/contrib.
CANDIDATE_URLS = [
    "https://cran.r-project.org/src/contrib/SpatialPack_0.4-1.tar.gz",
    "https://cloud.r-project.org/src/contrib/SpatialPack_0.4-1.tar.gz",
    "https://cran.r-project.org/src/contrib/Archive/SpatialPack/SpatialPack_0.4-1.tar.gz",
    "https://cran.r-project.org/src/contrib/Archive/SpatialPack/SpatialPack_0.4.tar.gz",
    "https://cran.r-project.org/src/contrib/Archive/SpatialPack/SpatialPack_0.3-8196.tar.gz",
    "https://cran.r-project.org/src/contrib/Archive/SpatialPack/SpatialPack_0.3-8.tar.gz",
    "https://cran.r-project.org/src/contrib/Archive/SpatialPack/SpatialPack_0.3.tar.gz",
    "https://cran.r-project.org/src/contrib/Archive/SpatialPack/SpatialPack_0.2-3.tar.gz",
]

NA_INT = -2147483648

# SEXP type codes from R's serialization format.
SYMSXP = 1
LISTSXP = 2
LANGSXP = 6
CHARSXP = 9
LGLSXP = 10
INTSXP = 13
REALSXP = 14
CPLXSXP = 15
STRSXP = 16
VECSXP = 19
RAWSXP = 24
ALTREP_SXP = 238
ATTRLISTSXP = 239
ATTRLANGSXP = 240
NAMESPACESXP = 242
PACKAGESXP = 243
MISSINGARG_SXP = 251
GLOBALENV_SXP = 253
NILVALUE_SXP = 254
REFSXP = 255


class Symbol(str):
    """An R symbol; behaves as its print name."""


class PairNode:
    __slots__ = ("tag", "car", "cdr", "attr")

    def __init__(self, tag, car, cdr, attr):
        self.tag, self.car, self.cdr, self.attr = tag, car, cdr, attr


class RObject:
    """A decoded R vector/list with its attributes."""

    __slots__ = ("type", "data", "attr")

    def __init__(self, type_, data, attr=None):
        self.type, self.data, self.attr = type_, data, attr or {}

    def attribute(self, name):
        return self.attr.get(name)


class RDataError(ValueError):
    pass


class RDataParser:
    """Decoder for the XDR (big-endian binary) RData workspace format."""

    def __init__(self, payload: bytes):
        self.buf = payload
        self.pos = 0
        self.refs: list[object] = []

    # -- primitive readers ---------------------------------------------------
    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise RDataError("truncated RData stream")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def int4(self) -> int:
        return struct.unpack(">i", self.take(4))[0]

    def real8(self) -> float:
        return struct.unpack(">d", self.take(8))[0]

    # -- stream structure -----------------------------------------------------
    def parse_workspace(self) -> dict:
        magic = self.take(5)
        if magic not in (b"RDX2\n", b"RDX3\n"):
            raise RDataError(f"not an RData version 2/3 file (magic {magic!r})")
        fmt = self.take(2)
        if fmt != b"X\n":
            raise RDataError(f"only the XDR binary layout is supported (got {fmt!r})")
        version = self.int4()
        self.int4()  # writer version
        self.int4()  # minimum reader version
        if version >= 3:
            enc_len = self.int4()
            self.take(enc_len)  # native encoding name
        elif version != 2:
            raise RDataError(f"unsupported serialization version {version}")

        bindings: dict[str, object] = {}
        node = self.read_item()
        while isinstance(node, PairNode):
            if node.tag is not None:
                bindings[str(node.tag)] = node.car
            node = node.cdr
        return bindings

    # -- items ---------------------------------------------------------------
    def read_item(self):
        flags = self.int4()
        sexp = flags & 0xFF
        levels = flags >> 12
        has_attr = bool(flags & (1 << 9))
        has_tag = bool(flags & (1 << 10))

        if sexp == NILVALUE_SXP:
            return None
        if sexp == REFSXP:
            idx = flags >> 8
            if idx == 0:
                idx = self.int4()
            if not 1 <= idx <= len(self.refs):
                raise RDataError(f"dangling reference {idx}")
            return self.refs[idx - 1]
        if sexp == SYMSXP:
            name = self.read_item()
            sym = Symbol(name)
            self.refs.append(sym)
            return sym
        if sexp in (LISTSXP, LANGSXP, ATTRLISTSXP, ATTRLANGSXP):
            attr = self.read_item() if has_attr else None
            tag = self.read_item() if has_tag else None
            car = self.read_item()
            cdr = self.read_item()
            return PairNode(tag, car, cdr, attr)
        if sexp == CHARSXP:
            n = self.int4()
            if n == -1:
                return None  # NA_character_
            raw = self.take(n)
            if levels & 0x8:  # LATIN1 flag
                return raw.decode("latin-1")
            return raw.decode("utf-8", errors="replace")
        if sexp in (LGLSXP, INTSXP):
            n = self.int4()
            data = list(struct.unpack(f">{n}i", self.take(4 * n)))
            return RObject(sexp, data, self.read_attributes(has_attr))
        if sexp == REALSXP:
            n = self.int4()
            data = list(struct.unpack(f">{n}d", self.take(8 * n)))
            return RObject(sexp, data, self.read_attributes(has_attr))
        if sexp == CPLXSXP:
            n = self.int4()
            raw = struct.unpack(f">{2 * n}d", self.take(16 * n))
            data = [complex(raw[2 * i], raw[2 * i + 1]) for i in range(n)]
            return RObject(sexp, data, self.read_attributes(has_attr))
        if sexp == STRSXP:
            n = self.int4()
            data = [self.read_item() for _ in range(n)]
            return RObject(sexp, data, self.read_attributes(has_attr))
        if sexp == VECSXP:
            n = self.int4()
            data = [self.read_item() for _ in range(n)]
            return RObject(sexp, data, self.read_attributes(has_attr))
        if sexp == RAWSXP:
            n = self.int4()
            return RObject(sexp, self.take(n), self.read_attributes(has_attr))
        if sexp == ALTREP_SXP:
            info = self.read_item()  # class info (symbol/package pairlist)
            state = self.read_item()
            self.read_item()  # attributes slot
            return self.expand_altrep(info, state)
        if sexp in (GLOBALENV_SXP, MISSINGARG_SXP):
            return None
        if sexp in (NAMESPACESXP, PACKAGESXP):
            self.read_item()  # name spec (a STRSXP)
            return None
        raise RDataError(f"unhandled SEXP type {sexp} at offset {self.pos - 4}")

    def read_attributes(self, has_attr: bool) -> dict:
        if not has_attr:
            return {}
        node = self.read_item()
        out = {}
        while isinstance(node, PairNode):
            if node.tag is not None:
                out[str(node.tag)] = node.car
            node = node.cdr
        return out

    def expand_altrep(self, info, state):
        # The only ALTREP payload R emits into .rda files by default is the
        # compact integer sequence used for row.names (1:n).
        name = None
        if isinstance(info, PairNode):
            name = str(info.car) if info.car is not None else None
        if name == "compact_intseq" and isinstance(state, RObject):
            length, start, step = state.data[:3]
            vals = [int(start + i * step) for i in range(int(length))]
            return RObject(INTSXP, vals)
        if name == "compact_realseq" and isinstance(state, RObject):
            length, start, step = state.data[:3]
            vals = [start + i * step for i in range(int(length))]
            return RObject(REALSXP, vals)
        if name in ("wrap_real", "wrap_integer", "wrap_string", "wrap_logical"):
            if isinstance(state, PairNode):
                return state.car
        raise RDataError(f"unhandled ALTREP class {name!r}")


# --------------------------------------------------------------------------
# Dataset extraction
# --------------------------------------------------------------------------


def decompress(raw: bytes) -> bytes:
    if raw[:2] == b"\x1f\x8b":
        return gzip.decompress(raw)
    if raw[:3] == b"BZh":
        return bz2.decompress(raw)
    if raw[:6] == b"\xfd7zXZ\x00":
        return lzma.decompress(raw)
    return raw


def data_frames(bindings: dict) -> dict:
    out = {}
    for name, obj in bindings.items():
        if not isinstance(obj, RObject) or obj.type != VECSXP:
            continue
        klass = obj.attribute("class")
        if isinstance(klass, RObject) and "data.frame" in klass.data:
            out[name] = obj
    return out


def column_table(df: RObject) -> dict[str, list]:
    names = df.attribute("names")
    if not isinstance(names, RObject):
        raise RDataError("data frame has no column names")
    table = {}
    for name, col in zip(names.data, df.data):
        if isinstance(col, RObject) and col.type in (REALSXP, INTSXP, LGLSXP):
            table[name] = col.data
    return table


def pick_column(table: dict[str, list], patterns: list[str], what: str) -> str:
    for pat in patterns:
        rx = re.compile(pat, re.IGNORECASE)
        hits = [name for name in table if rx.fullmatch(name)]
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise RDataError(f"ambiguous match for {what}: {hits}")
    raise RDataError(f"no column matches {what} (have: {sorted(table)}); use --cols")


def is_na(v) -> bool:
    if v is None or v == NA_INT:
        return True
    return isinstance(v, float) and math.isnan(v)


def to_csv(table: dict[str, list], cols: list[str]) -> tuple[str, int, int]:
    lengths = {len(table[c]) for c in cols}
    if len(lengths) != 1:
        raise RDataError(f"selected columns differ in length: {lengths}")
    rows = []
    dropped = 0
    for i in range(lengths.pop()):
        vals = [table[c][i] for c in cols]
        if any(is_na(v) for v in vals):
            dropped += 1
            continue
        rows.append(",".join(repr(float(v)) for v in vals))
    return "s1,s2,x,y\n" + "\n".join(rows) + "\n", len(rows), dropped


def extract_csv(rda: bytes, cols_override: str | None) -> tuple[str, int, int]:
    bindings = RDataParser(decompress(rda)).parse_workspace()
    frames = data_frames(bindings)
    if not frames:
        raise RDataError(f"no data frame found (objects: {sorted(bindings)})")
    name = "murray" if "murray" in frames else sorted(frames)[0]
    table = column_table(frames[name])

    if cols_override:
        chosen = [c.strip() for c in cols_override.split(",")]
        if len(chosen) != 4:
            raise RDataError("--cols needs exactly four names: s1,s2,x,y")
        for c in chosen:
            if c not in table:
                raise RDataError(f"column {c!r} not in {sorted(table)}")
    else:
        chosen = [
            pick_column(table, [r"s1", r"xutm", r"utmx", r"east(ing)?", r"lon(gitude)?", r"x"],
                        "the first coordinate"),
            pick_column(table, [r"s2", r"yutm", r"utmy", r"north(ing)?", r"lat(itude)?", r"y"],
                        "the second coordinate"),
            pick_column(table, [r"as", r"arsenic"], "arsenic (x)"),
            pick_column(table, [r"pb", r"lead"], "lead (y)"),
        ]
    print(f"dataset '{name}': using columns {chosen} as s1,s2,x,y")
    return to_csv(table, chosen)


def rda_from_tarball(raw: bytes) -> bytes:
    with tarfile.open(fileobj=io.BytesIO(raw), mode="r:*") as tar:
        for member in tar.getmembers():
            if re.search(r"data/murray\.(rda|RData)$", member.name, re.IGNORECASE):
                f = tar.extractfile(member)
                if f is None:
                    break
                return f.read()
    raise RDataError("tarball contains no data/murray.rda")


def download(urls: list[str]) -> bytes:
    last = None
    for url in urls:
        try:
            print(f"fetching {url} ...")
            with urllib.request.urlopen(url, timeout=60) as resp:
                return resp.read()
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            print(f"  failed: {exc}")
            last = exc
    raise RDataError(f"all download attempts failed (last error: {last})")


# --------------------------------------------------------------------------
# Self test: encode a small synthetic workspace and decode it again.
# --------------------------------------------------------------------------


def _enc_int(v: int) -> bytes:
    return struct.pack(">i", v)


def _enc_charsxp(s: str) -> bytes:
    b = s.encode()
    return _enc_int(CHARSXP) + _enc_int(len(b)) + b


def _enc_strsxp(items: list[str]) -> bytes:
    return _enc_int(STRSXP) + _enc_int(len(items)) + b"".join(_enc_charsxp(s) for s in items)


def _enc_sym(name: str) -> bytes:
    return _enc_int(SYMSXP) + _enc_charsxp(name)


def _enc_realsxp(vals: list[float]) -> bytes:
    return _enc_int(REALSXP) + _enc_int(len(vals)) + struct.pack(f">{len(vals)}d", *vals)


def _enc_intsxp(vals: list[int]) -> bytes:
    return _enc_int(INTSXP) + _enc_int(len(vals)) + struct.pack(f">{len(vals)}i", *vals)


def _synthetic_rda() -> bytes:
    cols = {
        "xutm": [421632.0, 421712.0, 421792.0],
        "yutm": [4510124.0, 4510124.0, 4510204.0],
        "As": [1.42, 7.25, float("nan")],
        "Pb": [110.0, 220.5, 90.25],
    }
    frame = _enc_int(VECSXP | (1 << 8) | (1 << 9)) + _enc_int(len(cols))
    frame += b"".join(_enc_realsxp(v) for v in cols.values())
    # attributes: names, row.names (compact NA form), class
    frame += _enc_int(LISTSXP | (1 << 10)) + _enc_sym("names") + _enc_strsxp(list(cols))
    frame += _enc_int(LISTSXP | (1 << 10)) + _enc_sym("row.names") + _enc_intsxp([NA_INT, -3])
    frame += _enc_int(LISTSXP | (1 << 10)) + _enc_sym("class") + _enc_strsxp(["data.frame"])
    frame += _enc_int(NILVALUE_SXP)

    body = _enc_int(LISTSXP | (1 << 10)) + _enc_sym("murray") + frame + _enc_int(NILVALUE_SXP)
    payload = b"RDX2\nX\n" + _enc_int(2) + _enc_int(0x030600) + _enc_int(0x020300) + body
    return gzip.compress(payload)


def self_test() -> None:
    csv, kept, dropped = extract_csv(_synthetic_rda(), None)
    lines = csv.strip().split("\n")
    assert lines[0] == "s1,s2,x,y", lines[0]
    assert kept == 2 and dropped == 1, (kept, dropped)
    assert lines[1] == "421632.0,4510124.0,1.42,110.0", lines[1]
    assert lines[2] == "421712.0,4510124.0,7.25,220.5", lines[2]
    # REFSXP path: a second binding reusing the 'names' symbol by reference.
    p = RDataParser(decompress(_synthetic_rda()))
    p.parse_workspace()
    print("self-test passed: decoder round-trips a synthetic workspace")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=None, help="output CSV (default tests/data/murray.csv)")
    ap.add_argument("--url", action="append", default=[], help="extra tarball URL(s) to try first")
    ap.add_argument("--tarball", help="local SpatialPack source tarball")
    ap.add_argument("--rda", help="local murray.rda (skips download/extract)")
    ap.add_argument("--cols", help="comma list: s1,s2,x,y column names in the data frame")
    ap.add_argument("--self-test", action="store_true", help="validate the decoder offline")
    args = ap.parse_args()

    if args.self_test:
        self_test()
        return 0

    if args.rda:
        rda = Path(args.rda).read_bytes()
    elif args.tarball:
        rda = rda_from_tarball(Path(args.tarball).read_bytes())
    else:
        rda = rda_from_tarball(download(args.url + CANDIDATE_URLS))

    csv, kept, dropped = extract_csv(rda, args.cols)
    out = Path(args.out) if args.out else Path(__file__).resolve().parent.parent / "tests" / "data" / "murray.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv)
    note = f" ({dropped} rows with missing values dropped)" if dropped else ""
    print(f"wrote {out} with {kept} rows{note}")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except RDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(1)
