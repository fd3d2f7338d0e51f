"""Shim conformance gate: wire-protocol soak, range contracts, alert fixture.

Run with ``pytest shim/tests -v -s``.  The soak drives the real subprocess
surface (``python -m tartarus_shim``); the range contracts exercise the
descriptor functions over a generated thousand-molecule corpus.
"""

import json
import random
import subprocess
import sys
import time

import pytest

from molbench.molgraph import canonical_key, parse_smiles, write_smiles
from molbench.selfies import decode, random_sequence

from tartarus_shim.alerts import ALERTS_VERSION
from tartarus_shim.properties import PROPERTY_FUNCTIONS, qed, sascore

SHIM_CMD = [sys.executable, "-m", "tartarus_shim"]


def _spawn():
    return subprocess.Popen(
        SHIM_CMD,
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        text=True,
        bufsize=1,
    )


def _corpus(n, seed=4321):
    rng = random.Random(seed)
    out = {}
    while len(out) < n:
        mol = decode(random_sequence(rng.randrange(2, 30), rng))
        if mol.n_atoms < 2:
            continue
        out.setdefault(canonical_key(mol), mol)
    return list(out.values())[:n]


class TestHandshake:
    def test_handshake_advertises_backend_and_rules(self):
        proc = _spawn()
        try:
            handshake = json.loads(proc.stdout.readline())
            assert handshake["protocol"] == 1
            assert sorted(handshake["props"]) == sorted(PROPERTY_FUNCTIONS)
            assert handshake["alerts"] == ALERTS_VERSION
            assert "backend" in handshake
        finally:
            proc.stdin.close()
            proc.wait(timeout=10)
        print("[PASS] handshake advertises implemented properties and rule versions")


class TestProtocolSoak:
    def test_ten_thousand_request_soak(self):
        molecules = ["C", "CCO", "c1ccccc1", "CC(=O)O", "c1ccncc1",
                     "CC(C)O", "CCN", "c1cc[nH]c1", "CCSC", "FC(F)F"]
        proc = _spawn()
        violations = 0
        try:
            json.loads(proc.stdout.readline())  # handshake
            start = time.perf_counter()
            n = 10_000
            seen_ids = set()
            for k in range(n):
                smiles = "$$bad$$" if k % 97 == 0 else molecules[k % len(molecules)]
                request = {"id": f"s{k}", "smiles": smiles, "props": ["tpsa"]}
                proc.stdin.write(json.dumps(request) + "\n")
                proc.stdin.flush()
                response = json.loads(proc.stdout.readline())
                if response.get("id") != f"s{k}" or response["id"] in seen_ids:
                    violations += 1
                    continue
                seen_ids.add(response["id"])
                if smiles == "$$bad$$":
                    if response["status"] != "error":
                        violations += 1
                elif response["status"] != "ok" or "tpsa" not in response["values"]:
                    violations += 1
                else:
                    entry = response["values"]["tpsa"]
                    if entry["u"] != "A^2" or not isinstance(entry["v"], float):
                        violations += 1
            elapsed = time.perf_counter() - start
        finally:
            proc.stdin.close()
            proc.wait(timeout=10)
        assert violations == 0
        assert len(seen_ids) == n
        print(f"[PASS] 10^4-request soak, zero protocol violations, {elapsed:.1f}s")

    def test_determinism_within_process(self):
        proc = _spawn()
        try:
            json.loads(proc.stdout.readline())
            answers = []
            for k in range(2):
                request = {"id": f"d{k}", "smiles": "CC(=O)Oc1ccccc1C(=O)O",
                           "props": sorted(PROPERTY_FUNCTIONS)}
                proc.stdin.write(json.dumps(request) + "\n")
                proc.stdin.flush()
                answers.append(json.loads(proc.stdout.readline())["values"])
            assert answers[0] == answers[1]
        finally:
            proc.stdin.close()
            proc.wait(timeout=10)
        print("[PASS] identical molecule yields identical values in one process")


class TestRangeContracts:
    def test_sascore_and_qed_ranges_on_corpus(self):
        molecules = _corpus(1_000)
        for mol in molecules:
            sa = sascore(mol)
            q = qed(mol)
            assert 1.0 <= sa <= 10.0, write_smiles(mol)
            assert 0.0 <= q <= 1.0, write_smiles(mol)
        print("[PASS] sascore in [1,10] and qed in [0,1] on 1000 molecules")


class TestAlertFixture:
    def test_known_interference_fixture_fails(self):
        # para-quinone: a canonical pan-assay interference scaffold.
        proc = _spawn()
        try:
            json.loads(proc.stdout.readline())
            request = {"id": "q", "smiles": "O=C1C=CC(=O)C=C1", "props": ["alerts_pass"]}
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            response = json.loads(proc.stdout.readline())
            assert response["status"] == "ok"
            assert response["values"]["alerts_pass"]["v"] == 0.0
            # a clean molecule passes
            request = {"id": "c", "smiles": "CCOC(=O)c1ccc(N)cc1", "props": ["alerts_pass"]}
            proc.stdin.write(json.dumps(request) + "\n")
            proc.stdin.flush()
            response = json.loads(proc.stdout.readline())
            assert response["values"]["alerts_pass"]["v"] == 1.0
        finally:
            proc.stdin.close()
            proc.wait(timeout=10)
        print("[PASS] quinone fixture fails alerts_pass; clean ester passes")


class TestHarnessIntegration:
    def test_core_subprocess_provider_speaks_to_shim(self):
        from molbench.providers import Budget, Evaluator, SubprocessProvider

        provider = SubprocessProvider(" ".join(SHIM_CMD))
        try:
            assert set(provider.property_names) == set(PROPERTY_FUNCTIONS)
            evaluator = Evaluator(provider, Budget(max_proposals=50))
            result = evaluator.evaluate_one(
                "CC(=O)Oc1ccccc1C(=O)O", sorted(PROPERTY_FUNCTIONS)
            )
            record = result.records[0]
            assert record.ok()
            assert 1.0 <= record.values["sascore"][0] <= 10.0
            assert 0.0 <= record.values["qed"][0] <= 1.0
            assert record.values["tpsa"][1] == "A^2"
        finally:
            provider.close()
        print("[PASS] harness evaluator round trip through the shim")

    def test_filters_check_with_shim_provider(self, tmp_path):
        infile = tmp_path / "mols.smi"
        infile.write_text("CCOC(=O)c1ccc(N)cc1\nO=C1C=CC(=O)C=C1\n")
        result = subprocess.run(
            [sys.executable, "-m", "molbench.cli", "filters", "check",
             "--bank", "docking", "--in", str(infile),
             "--provider-cmd", " ".join(SHIM_CMD), "--tpsa-practical"],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
        lines = [l for l in result.stdout.splitlines() if "\t" in l]
        verdict = {l.split("\t")[0]: l.split("\t")[1] for l in lines}
        assert verdict["O=C1C=CC(=O)C=C1"] == "FAIL"
        print("[PASS] docking bank check through the shim provider")
