"""Generate instances, solve and report them with nasp_cli, and validate every file against docs/."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

cli, docs = sys.argv[1], pathlib.Path(sys.argv[2])
schemas = {name: json.loads((docs / f"{name}.schema.json").read_text()) for name in ("instance", "result", "report")}
registry = Registry().with_resources(
    [(s["$id"], Resource.from_contents(s)) for s in schemas.values()]
    + [(f"{n}.schema.json", Resource.from_contents(s)) for n, s in schemas.items()])


def check(name, path):
    validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
    validator.validate(json.loads(pathlib.Path(path).read_text()))


def cli_run(*args, ok=(0,)):
    code = subprocess.run([cli, *args], capture_output=True).returncode
    if code not in ok:
        sys.exit(f"nasp_cli {' '.join(args)} exited {code}")


with tempfile.TemporaryDirectory() as tmp:
    t = pathlib.Path(tmp)
    cases = [["--kind", "energy", "--seed", "4", "--countries", "2", "--followers", "2"],
             ["--kind", "energy", "--seed", "5", "--no-trade", "--taxb", "1"],
             ["--kind", "example1"], ["--kind", "remark2"], ["--kind", "random-trivial", "--seed", "9"]]
    for i, gen in enumerate(cases):
        inst, res = t / f"i{i}.json", t / f"r{i}.json"
        cli_run("generate", *gen, "--out", str(inst))
        check("instance", inst)
        cli_run("solve", "--in", str(inst), "--algorithm", "inner", "--timing", "--out", str(res), ok=(0, 2))
        check("result", res)
        if gen[1] == "energy":
            rep = t / f"p{i}.json"
            cli_run("report", "--in", str(inst), "--result", str(res), "--out", str(rep))
            check("report", rep)
print("all files match the schemas")
