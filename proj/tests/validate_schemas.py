"""Run each CLI subcommand with --format json and validate against schemas/."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])

runs = {
    "xi": [["xi", "--l", "2,0,0,0"], ["xi", "--l", "1,0,0,0", "--delta", "auto", "--E", "0.3+0.1i"]],
    "qpoly": [["qpoly", "--l", "1,1,0,0"], ["qpoly", "--l", "2", "--specialize", "--lattice", "1,1.6i"]],
    "opA": [["opA", "--l", "2,0,0,0"]],
    "bands": [["bands", "--l", "1", "--grid", "60"]],
    "monodromy": [["monodromy", "--l", "2", "--E-min", "-4", "--E-max", "6", "--grid", "7"],
                  ["monodromy", "--l", "1", "--E", "0.5+0.5i", "--method", "floquet"]],
    "reduction": [["reduction", "--E-min", "-8", "--E-max", "17", "--grid", "5"]],
    "lame": [["lame", "--l", "5", "--lattice", "1,1.6i"]],
    "density": [["density", "--grid", "20"]],
    "wkb": [["wkb", "--terms", "5"]],
    "check": [["check"]],
}

failed = 0
for name, cmds in runs.items():
    schema = json.loads((schema_dir / f"{name}.json").read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    for args in cmds:
        out = subprocess.run([cli, *args, "--format", "json"], capture_output=True, text=True)
        try:
            if out.returncode != 0:
                raise RuntimeError(f"exit {out.returncode}: {out.stderr.strip()}")
            jsonschema.validate(json.loads(out.stdout), schema)
            print("ok  ", " ".join(args))
        except Exception as e:  # noqa: BLE001
            failed += 1
            print("FAIL", " ".join(args), "->", e)

# Configs written by --dump-config validate and load back unchanged.
cfg_schema = json.loads((schema_dir / "config.json").read_text())
dump = subprocess.run([cli, "xi", "--l", "1,0,2,0", "--lattice", "1,0.2+1.1i", "--E", "0.1-2i", "--grid", "9",
                       "--E-min", "-1", "--E-max", "1", "--tol", "1e-9", "--dump-config"],
                      capture_output=True, text=True, check=True).stdout
jsonschema.validate(json.loads(dump), cfg_schema)
path = pathlib.Path("roundtrip_config.json")
path.write_text(dump)
again = subprocess.run([cli, "xi", "--config", str(path), "--dump-config"], capture_output=True, text=True, check=True).stdout
if json.loads(again) != json.loads(dump):
    failed += 1
    print("FAIL config round trip")
else:
    print("ok   config round trip")

lat_schema = json.loads((schema_dir / "lattice.json").read_text())
q = json.loads(subprocess.run([cli, "qpoly", "--l", "1", "--specialize", "--format", "json"],
                              capture_output=True, text=True, check=True).stdout)
jsonschema.validate(q["lattice"], lat_schema)

sys.exit(1 if failed else 0)
