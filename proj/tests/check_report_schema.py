"""Builds a small corpus with the CLI, scores it, and validates the report
(forged and pristine runs) against the published schema."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def run(*args):
    subprocess.run([str(a) for a in args], check=True, capture_output=True)


def main(cli, schema_path):
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for name, spec, extra in [
            ("forged", {"preset": "noi1", "width": 256, "height": 256}, []),
            ("pristine", {"op": "none", "width": 256, "height": 256}, ["--pristine"]),
        ]:
            (tmp / f"{name}.json").write_text(json.dumps(spec))
            corpus, pred, report = tmp / f"{name}_c", tmp / f"{name}_p", tmp / f"{name}.report.json"
            run(cli, "synth", "--spec", tmp / f"{name}.json", "--n", 3, "--seed", 5, "--out", corpus)
            run(cli, "detect", "--algo", "noi1,noi4,ela", "--index", corpus / "index.csv", "--out", pred)
            run(cli, "score", "--pred", pred, "--index", corpus / "index.csv", "--out", report, *extra)
            doc = json.loads(report.read_text())
            errors = sorted(validator.iter_errors(doc), key=str)
            for e in errors:
                print(f"{name}: {e.message} at {list(e.path)}")
            if errors:
                return 1
            print(f"{name}: report valid ({len(doc['perImage'])} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
