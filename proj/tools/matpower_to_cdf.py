#!/usr/bin/env python3
"""Convert a MATPOWER version-2 case file (.m) into IEEE Common Data Format.

Used once to produce the files under data/cases/. Generators on the same bus
are summed, out-of-service generators and branches are dropped, and bus
shunts are converted from MW/MVAr at 1 p.u. to per-unit on the system base.
The written file is re-read column by column and compared to the source.
"""
import argparse
import hashlib
import re
import sys


def parse_matrix(text, name):
    m = re.search(r"mpc\.%s\s*=\s*\[(.*?)\];" % name, text, re.S)
    if not m:
        raise SystemExit("missing mpc.%s" % name)
    rows = []
    for line in m.group(1).splitlines():
        line = line.split("%")[0].strip().rstrip(";").strip()
        if line:
            rows.append([float(v) for v in line.split()])
    return rows


def parse_scalar(text, name):
    m = re.search(r"mpc\.%s\s*=\s*([0-9.eE+-]+)\s*;" % name, text)
    return float(m.group(1))


def put(card, first, last, text):
    width = last - first + 1
    if len(text) > width:
        raise ValueError("field %r overflows columns %d-%d" % (text, first, last))
    text = text.rjust(width)
    card[first - 1:last] = list(text)


def card(width=128):
    return [" "] * width


def fmt(value, width, decimals):
    # most decimals (up to the requested count) that still fit the column range
    for d in range(decimals, -1, -1):
        text = "%*.*f" % (width, d, value)
        if len(text) <= width:
            return text
    raise ValueError("%r does not fit in %d columns" % (value, width))


def convert(src_text, case_id):
    base = parse_scalar(src_text, "baseMVA")
    bus = parse_matrix(src_text, "bus")
    gen = parse_matrix(src_text, "gen")
    branch = parse_matrix(src_text, "branch")

    pg, qg, vg = {}, {}, {}
    for g in gen:
        if g[7] <= 0:
            continue
        b = int(g[0])
        pg[b] = pg.get(b, 0.0) + g[1]
        qg[b] = qg.get(b, 0.0) + g[2]
        vg[b] = g[5]

    type_map = {1: 0, 2: 2, 3: 3}
    lines = []
    title = card(73)
    title[1:9] = list("10/15/26")
    title[10:30] = list("MATPOWER CONVERSION".ljust(20))
    put(title, 32, 37, fmt(base, 6, 1))
    put(title, 39, 42, "1900")
    title[43] = "S"
    title[45:73] = list(case_id[:28].ljust(28))
    lines.append("".join(title).rstrip())
    lines.append("BUS DATA FOLLOWS%30d ITEMS" % len(bus))
    for b in bus:
        num = int(b[0])
        c = card()
        put(c, 1, 4, "%d" % num)
        c[5:17] = list(("Bus %d" % num).ljust(12))
        put(c, 19, 20, "%d" % int(b[6]))
        put(c, 21, 23, "%d" % int(b[10]))
        put(c, 25, 26, "%d" % type_map[int(b[1])])
        v = vg.get(num, b[7]) if int(b[1]) in (2, 3) else b[7]
        put(c, 28, 33, fmt(v, 6, 4))
        put(c, 34, 40, fmt(b[8], 7, 2))
        put(c, 41, 49, fmt(b[2], 9, 2))
        put(c, 50, 59, fmt(b[3], 10, 2))
        put(c, 60, 67, fmt(pg.get(num, 0.0), 8, 4))
        put(c, 68, 75, fmt(qg.get(num, 0.0), 8, 4))
        put(c, 77, 83, fmt(b[9], 7, 2))
        put(c, 85, 90, fmt(v if int(b[1]) in (2, 3) else 0.0, 6, 4))
        put(c, 91, 98, fmt(0.0, 8, 2))
        put(c, 99, 106, fmt(0.0, 8, 2))
        put(c, 107, 114, fmt(b[4] / base, 8, 4))
        put(c, 115, 122, fmt(b[5] / base, 8, 4))
        put(c, 124, 127, "0")
        lines.append("".join(c).rstrip())
    lines.append("-999")
    live = [br for br in branch if br[10] > 0]
    lines.append("BRANCH DATA FOLLOWS%27d ITEMS" % len(live))
    for br in live:
        c = card(126)
        put(c, 1, 4, "%d" % int(br[0]))
        put(c, 6, 9, "%d" % int(br[1]))
        put(c, 11, 12, "1")
        put(c, 13, 14, "1")
        put(c, 17, 17, "1")
        is_xfmr = br[8] != 0.0 or br[9] != 0.0
        put(c, 19, 19, "1" if is_xfmr else "0")
        put(c, 20, 29, fmt(br[2], 10, 6))
        put(c, 30, 40, fmt(br[3], 11, 6))
        put(c, 41, 50, fmt(br[4], 10, 6))
        for first in (51, 56, 61):
            put(c, first, first + 4, "%d" % int(br[5]))
        put(c, 69, 72, "0")
        put(c, 74, 74, "0")
        put(c, 77, 82, fmt(br[8], 6, 4))
        put(c, 84, 90, fmt(br[9], 7, 2))
        lines.append("".join(c).rstrip())
    lines.append("-999")
    lines.append("LOSS ZONES FOLLOWS                     1 ITEMS")
    lines.append("  1 ALL")
    lines.append("-99")
    lines.append("INTERCHANGE DATA FOLLOWS                 0 ITEMS")
    lines.append("-9")
    lines.append("TIE LINES FOLLOWS                     0 ITEMS")
    lines.append("-999")
    lines.append("END OF DATA")
    out = "\n".join(lines) + "\n"
    verify(out, bus, live, base, pg, vg)
    return out


def field(line, first, last):
    return float(line[first - 1:last].strip() or 0)


def verify(out, bus, live, base, pg, vg):
    rows = out.splitlines()
    bus_rows = rows[2:2 + len(bus)]
    for b, line in zip(bus, bus_rows):
        num = int(b[0])
        assert int(field(line, 1, 4)) == num
        assert abs(field(line, 41, 49) - b[2]) < 1e-9, line
        assert abs(field(line, 50, 59) - b[3]) < 1e-9, line
        assert abs(field(line, 60, 67) - pg.get(num, 0.0)) < 1e-9, line
        assert abs(field(line, 107, 114) - b[4] / base) < 1e-9, line
        assert abs(field(line, 115, 122) - b[5] / base) < 1e-9, line
        if int(b[1]) in (2, 3):
            assert abs(field(line, 28, 33) - vg.get(num, b[7])) < 1e-9, line
    start = 2 + len(bus) + 2
    for br, line in zip(live, rows[start:start + len(live)]):
        assert abs(field(line, 20, 29) - br[2]) < 1e-12, line
        assert abs(field(line, 30, 40) - br[3]) < 1e-12, line
        assert abs(field(line, 41, 50) - br[4]) < 1e-12, line
        assert abs(field(line, 77, 82) - br[8]) < 1e-12, line
        assert abs(field(line, 84, 90) - br[9]) < 1e-12, line


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("source")
    ap.add_argument("output")
    ap.add_argument("--case-id", required=True)
    args = ap.parse_args()
    with open(args.source, "rb") as f:
        raw = f.read()
    out = convert(raw.decode("latin-1"), args.case_id)
    with open(args.output, "w") as f:
        f.write(out)
    print("%s  sha256=%s" % (args.source, hashlib.sha256(raw).hexdigest()), file=sys.stderr)


if __name__ == "__main__":
    main()
