"""Validate CLI reports against the published schema with the jsonschema package."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

cli = sys.argv[1]
schema = json.loads(subprocess.run([cli, "schema"], check=True, capture_output=True, text=True).stdout)
jsonschema.Draft7Validator.check_schema(schema)
validator = jsonschema.Draft7Validator(schema)

runs = [["krylov"], ["asymptotics", "--sweep-max", "1000"], ["winding-props", "--seeds", "20", "--seed", "3"],
        ["rplus-classify"], ["semigroup-ex1"], ["krylov", "--expect", "not_cyclic"]]
with tempfile.TemporaryDirectory() as out:
    for args in runs:
        subprocess.run([cli, *args, "--out-dir", out], capture_output=True)
        doc = json.loads((Path(out) / f"{args[0]}.json").read_text())
        errors = list(validator.iter_errors(doc))
        if errors:
            sys.exit(f"{args}: {errors[0].message}")
        for mutate in (lambda d: d.update(schema_version="0.9"), lambda d: d.pop("seed"),
                       lambda d: d.update(extra=1), lambda d: d["checks"][0].update(pass_="x")):
            bad = json.loads(json.dumps(doc))
            mutate(bad)
            if validator.is_valid(bad):
                sys.exit(f"{args}: mutated report accepted")
        print(f"{args[0]}: valid, mutations rejected")
