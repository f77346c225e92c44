"""Runs the CLI on small inputs and validates every JSON output against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    resources = []
    for path in schema_dir.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)

    def check(instance, schema_name):
        schema = json.loads((schema_dir / schema_name).read_text())
        jsonschema.Draft202012Validator(schema, registry=registry).validate(instance)

    with tempfile.TemporaryDirectory() as tmp:
        work = pathlib.Path(tmp)
        spec = {"variant": "lipschitz_graph", "n_points": 300, "seed": 3, "params": {"slope": 0.3}}
        check(spec, "generator_spec.schema.json")
        (work / "spec.json").write_text(json.dumps(spec))

        def run(*args):
            return subprocess.run([cli, *args], cwd=work, check=True, capture_output=True, text=True).stdout

        run("gen", "spec.json", "-o", "g.csv")
        check(json.loads((work / "g.csv.manifest.json").read_text()), "manifest.schema.json")
        check(json.loads(run("stats", "g.csv", "-k", "1", "-k", "huovinen", "--mv-eps", "0.01")), "stats.schema.json")
        check(json.loads(run("stats", "g.csv", "--mc", "1000", "--seed", "4", "--tau", "10")), "stats.schema.json")
        check(json.loads(run("corona", "g.csv")), "corona.schema.json")
        for line in run("verify", "melnikov", "factored").splitlines():
            check(json.loads(line), "verify_line.schema.json")
    print("all outputs validate")
    return 0


if __name__ == "__main__":
    sys.exit(main())
