#!/usr/bin/env python3
"""Regenerates include/dialkit/unicode_data.hpp from Python's unicodedata.

The header carries three sorted tables driving canonical normalization:
canonical decompositions (Hangul excluded, handled algorithmically),
nonzero combining classes, and primary composition pairs (full composition
exclusions already removed, derived by round-tripping through NFC).

Usage: python3 scripts/gen_unicode_tables.py > include/dialkit/unicode_data.hpp
"""

import sys
import unicodedata

HANGUL_S_BASE = 0xAC00
HANGUL_S_COUNT = 11172


def canonical_decomposition(cp):
    raw = unicodedata.decomposition(chr(cp))
    if not raw or raw.startswith("<"):
        return None
    parts = [int(p, 16) for p in raw.split()]
    assert 1 <= len(parts) <= 2, hex(cp)
    return parts


def main():
    decomp = []
    ccc = []
    compose = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ch = chr(cp)
        k = unicodedata.combining(ch)
        if k:
            ccc.append((cp, k))
        if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
            continue
        parts = canonical_decomposition(cp)
        if parts is None:
            continue
        decomp.append((cp, parts[0], parts[1] if len(parts) == 2 else 0))
        if len(parts) == 2:
            # A pair is a primary composite iff NFC maps the decomposition
            # back to it; this folds in the full composition exclusions.
            pair = chr(parts[0]) + chr(parts[1])
            if unicodedata.normalize("NFC", pair) == ch:
                compose.append((parts[0], parts[1], cp))

    compose.sort()

    out = sys.stdout
    out.write("// Generated by scripts/gen_unicode_tables.py "
              "from Unicode %s data.\n" % unicodedata.unidata_version)
    out.write("// Do not edit by hand; rerun the script to refresh.\n")
    out.write("//\n")
    out.write("// Copyright 2026 The dialkit Authors\n")
    out.write("//\n")
    out.write('// Licensed under the Apache License, Version 2.0 (the "License");\n')
    out.write("// you may not use this file except in compliance with the License.\n")
    out.write("// You may obtain a copy of the License at\n")
    out.write("//\n")
    out.write("//  http://www.apache.org/licenses/LICENSE-2.0\n")
    out.write("//\n")
    out.write("// Unless required by applicable law or agreed to in writing, software\n")
    out.write('// distributed under the License is distributed on an "AS IS" BASIS,\n')
    out.write("// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.\n")
    out.write("// See the License for the specific language governing permissions and\n")
    out.write("// limitations under the License.\n\n")
    out.write("#pragma once\n\n#include <cstdint>\n\nnamespace dialkit::unicode_data {\n\n")

    out.write("struct Decomposition {\n  uint32_t cp;\n  uint32_t first;\n"
              "  uint32_t second;  // 0 for singleton decompositions\n};\n\n")
    out.write("struct CombiningClass {\n  uint32_t cp;\n  uint8_t ccc;\n};\n\n")
    out.write("struct Composition {\n  uint32_t first;\n  uint32_t second;\n  uint32_t composite;\n};\n\n")

    out.write("// Sorted by cp.\n")
    out.write("inline constexpr Decomposition kDecompositions[] = {\n")
    for cp, a, b in decomp:
        out.write("    {0x%X, 0x%X, 0x%X},\n" % (cp, a, b))
    out.write("};\n\n")

    out.write("// Sorted by cp; code points absent from the table have class 0.\n")
    out.write("inline constexpr CombiningClass kCombiningClasses[] = {\n")
    for cp, k in ccc:
        out.write("    {0x%X, %d},\n" % (cp, k))
    out.write("};\n\n")

    out.write("// Sorted by (first, second).\n")
    out.write("inline constexpr Composition kCompositions[] = {\n")
    for a, b, c in compose:
        out.write("    {0x%X, 0x%X, 0x%X},\n" % (a, b, c))
    out.write("};\n\n")
    out.write("}  // namespace dialkit::unicode_data\n")


if __name__ == "__main__":
    main()
