import io
import json
import sys
import tempfile
from contextlib import redirect_stderr
from pathlib import Path

sys.path.insert(0, "/root/pkg/src")
from lorpto.cli import main

tmp = Path(tempfile.mkdtemp())


def run(argv):
    err = io.StringIO()
    buf = io.BytesIO()

    class _Wrap:
        buffer = buf

        def write(self, s):
            pass

        def flush(self):
            pass

    old = sys.stdout
    sys.stdout = _Wrap()
    try:
        with redirect_stderr(err):
            code = main(argv)
    finally:
        sys.stdout = old
    return code, buf.getvalue(), err.getvalue()


# check: passing flat scan
code, raw, err = run(
    ["check", "--space", "minkowski:1", "--region", "0,0;2,0", "--samples", "500", "--seed", "5"]
)
print("check flat:", code, "json-ok:", raw.startswith(b'{"delta"'))
doc = json.loads(raw)
print("  keys:", sorted(doc))
print("  violations:", doc["violations"], "samples:", doc["samples"])

# check: pos violations -> exit 2 (note equals form: region starts with '-')
code, raw, err = run(
    ["check", "--space", "model:1", "--region=-0.2,0;0.2,0", "--samples", "3000", "--seed", "0"]
)
doc = json.loads(raw)
print("check pos:", code, "violations:", doc["violations"])
# dash-region without equals form is a usage error
code, raw, err = run(
    ["check", "--space", "model:1", "--region", "-0.2,0;0.2,0", "--samples", "10"]
)
print("dash region no-equals:", code, err.strip()[:60])

# usage errors -> exit 1
cases = [
    ["check", "--space", "minkowski:1"],
    ["check", "--space", "weird:7", "--region", "0,0;2,0"],
    ["check", "--space", "minkowski:1", "--region", "0,0"],
    ["check", "--space", "minkowski:1", "--region", "2,0;0,0"],
    ["nosuchcommand"],
    [],
]
for argv in cases:
    code, raw, err = run(argv)
    print("err case:", argv[:3], "->", code, "|", err.strip()[:70])

# csv format via main
code, raw, err = run(
    [
        "check", "--space", "minkowski:1", "--region", "0,0;2,0",
        "--samples", "50", "--seed", "5", "--format", "csv",
    ]
)
print("csv:", code, raw.split(b"\n")[0])
print("csv lines:", len(raw.strip().split(b"\n")))

# --out writes a file
outp = tmp / "report.json"
code, raw, err = run(
    [
        "check", "--space", "minkowski:1", "--region", "0,0;2,0",
        "--samples", "50", "--seed", "5", "--out", str(outp),
    ]
)
print("out file:", code, raw == b"", json.loads(outp.read_text())["samples"])

# region equals-form
code, raw, err = run(
    ["check", "--space=minkowski:1", "--region=-1,0;1,0", "--samples", "50", "--seed", "2"]
)
print("equals-form region:", code)

# witness
code, raw, err = run(["witness", "--space", "minkowski:1", "--scale", "0.2"])
doc = json.loads(raw)
print("witness flat:", code, repr(doc["slack"]))
code, raw, err = run(["witness", "--space", "model:1", "--scale", "0.2"])
doc = json.loads(raw)
print("witness pos:", code, repr(doc["slack"]), sorted(doc))
code, raw, err = run(["witness", "--space", "model:-1", "--scale", "0.2"])
doc = json.loads(raw)
print("witness neg:", code, repr(doc["slack"]))
# bad config -> 1
code, raw, err = run(["witness", "--space", "minkowski:1", "--k1", "1.5"])
print("witness bad k:", code, err.strip()[:60])
# wedge overflow on model:1 with huge scale
code, raw, err = run(["witness", "--space", "model:1", "--scale", "1.0"])
print("witness overflow:", code, err.strip()[:80])

# invert
code, raw, err = run(
    ["invert", "--space", "minkowski:1", "--center", "0,0", "--point", "0.8,0.1", "--radius", "1"]
)
doc = json.loads(raw)
print("invert:", code, doc["image"], repr(doc["radius_product_gap"]))
code, raw, err = run(
    ["invert", "--space", "minkowski:1", "--center", "0,0", "--point", "0.1,0.8"]
)
print("invert spacelike:", code, err.strip()[:60])

# curvature estimate (v, w, v-w all future timelike)
code, raw, err = run(
    ["curvature", "estimate", "--space", "model:-1", "--v", "2,0.3", "--w", "1,0"]
)
print("curv est err:", err.strip()[:70])
doc = json.loads(raw)
print("curv est:", code, repr(doc["K_hat"]), sorted(doc))
code, raw, err = run(
    ["curvature", "estimate", "--space", "minkowski:3", "--v", "2,0.3", "--w", "1,0"]
)
doc = json.loads(raw)
print("curv est flat:", code, repr(doc["K_hat"]))
code, raw, err = run(
    ["curvature", "estimate", "--space", "model:-1", "--v", "1,0", "--w", "1,0.5"]
)
print("curv est bad legs:", code, err.strip()[:60])
# fourpoint
code, raw, err = run(
    ["curvature", "fourpoint", "--seps", "1,1.936492,2.958040,0.866025,1.936492,1", "--K", "0"]
)
doc = json.loads(raw)
print("curv 4pt:", code, doc["passes"], repr(doc["opposite_side_margin"]))
code, raw, err = run(
    ["curvature", "fourpoint", "--seps", "1,1,3,1,1,1", "--K", "0"]
)
print("curv 4pt unrealizable:", code, err.strip()[:70])
exact = "0.8660254037844386,2.958039891549808,4,1.7320508075688772,2.958039891549808,0.8660254037844386"
code, raw, err = run(["curvature", "fourpoint", "--seps", exact, "--K", "0"])
doc = json.loads(raw)
print("curv 4pt exact:", code, doc["passes"], repr(doc["opposite_side_margin"]),
      repr(doc["same_side_margin"]))

# cone
code, raw, err = run(["cone", "--space", "minkowski:1", "--samples", "200", "--seed", "3"])
doc = json.loads(raw)
print("cone flat:", code, repr(doc["residual"]))
code, raw, err = run(["cone", "--space", "model:-1", "--samples", "50", "--seed", "3"])
doc = json.loads(raw)
print("cone neg:", code, repr(doc["residual"]))

# causet sprinkle -> file -> check
cs_path = tmp / "cs.json"
code, raw, err = run(
    [
        "causet", "sprinkle", "--space", "minkowski:1", "--region", "0,0;2,0",
        "--n", "25", "--seed", "11", "--out", str(cs_path),
    ]
)
print("causet sprinkle:", code, cs_path.exists())
doc = json.loads(cs_path.read_text())
print("  doc keys:", sorted(doc))
code, raw, err = run(["causet", "check", "--in", str(cs_path)])
rep = json.loads(raw)
print("causet check file:", code, rep["samples"], rep["violations"], rep["space"])
code, raw, err = run(
    ["causet", "check", "--space", "minkowski:1", "--region", "0,0;2,0", "--n", "25", "--seed", "11"]
)
rep2 = json.loads(raw)
print("causet check direct equal:", rep2["samples"] == rep["samples"], rep2["space"])
code, raw, err = run(["causet", "check"])
print("causet usage:", code, err.strip()[:70])

# check --points pipeline
pts_doc = {
    "chart": "minkowski",
    "n": 1,
    "points": [[0.0, 0.0], [1.0, 0.2], [2.0, 0.1], [3.0, 0.0]],
}
pts_path = tmp / "pts.json"
pts_path.write_text(json.dumps(pts_doc))
code, raw, err = run(["check", "--points", str(pts_path)])
rep = json.loads(raw)
print("check points:", code, rep["samples"], rep["space"], rep["violations"])
code, raw, err = run(["check", "--points", str(pts_path), "--format", "csv"])
print("check points csv:", code, err.strip()[:60])
