#!/usr/bin/env python3
"""Prepend the Apache-2.0 header to the project C++ sources. Idempotent."""
import pathlib
import sys

HEADER = """// Copyright 2026 The snaq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

"""

root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")
paths = [p for d in ("include", "src", "tests", "tools") for p in (root / d).rglob("*")]
for path in sorted(paths):
    if path.suffix not in {".hpp", ".cpp"}:
        continue
    text = path.read_text()
    if text.startswith("// Copyright 2026 The snaq Authors"):
        continue
    path.write_text(HEADER + text)
    print(path)
