"""Re-run the oracle scripts into a scratch file and compare with the checked-in constants."""
import json
import pathlib
import subprocess
import sys

src, scratch = pathlib.Path(sys.argv[1]), pathlib.Path(sys.argv[2])
scratch.mkdir(parents=True, exist_ok=True)
out = scratch / "golden.json"
out.unlink(missing_ok=True)
subprocess.run([sys.executable, src / "oracles/oracle_shoot.py", "--out", out], check=True)
subprocess.run([sys.executable, src / "oracles/oracle_dense_eig.py", "--out", out, "--n", "600", "1200"], check=True)
fresh = json.loads(out.read_text())
golden = json.loads((src / "data/golden_constants.json").read_text())
for key, tol in (("q0", 1e-12), ("m_Q", 1e-10), ("e0", 1e-3)):
    a, b = fresh[key]["value"], golden[key]["value"]
    rel = abs(a - b) / abs(b)
    print(f"{key}: fresh {a!r} golden {b!r} rel {rel:.2e} (tol {tol:g})")
    assert rel < tol, key
    assert "oracle" in golden[key]["provenance"]
