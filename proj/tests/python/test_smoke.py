# Copyright 2026 The medchain Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import subprocess

import pytest

import medchain


def test_builtin_scenarios():
    assert medchain.SCENARIO_COUNT == 5
    s1 = medchain.scenario(1)
    assert s1["topology"] == "parallel"
    assert s1["total"] == 10000
    assert medchain.scenario(5)["topology"] == "integrated"
    with pytest.raises(medchain.MedchainError, match="1..5"):
        medchain.scenario(6)


def test_retrieval_run_is_deterministic():
    a = medchain.run(3, seed=2)
    b = medchain.run(3, seed=2)
    assert a == b
    assert a["completed"] == a["requests"] == 1000
    agg = a["aggregates"]
    assert agg["total_in"] == agg["total_out"] == sum(r["bytes_in"] for r in a["rows"])
    assert a["cross_channel_messages"] == 0


def test_compare_and_formats():
    text = medchain.run_report(3, seed=2)
    same = medchain.compare(text, text)
    assert same["throughput_ratio"] == pytest.approx(1.0)
    assert same["traffic_ratio"] == pytest.approx(1.0)
    assert medchain.run_report(3, seed=2, format="csv").count("TOTAL,,") == 1
    with pytest.raises(medchain.MedchainError):
        medchain.run_report(3, format="xml")
    with pytest.raises(medchain.MedchainError):
        medchain.compare("{}", text)


def test_verify_dump_and_hash(tmp_path):
    code, out, err = medchain.cli(["--scenario", "3", "--seed", "2", "--out", str(tmp_path), "--format", "json"])
    assert code == 0, err
    dump = (tmp_path / "scenario-3-2-channel-1.ledger").read_text()
    assert medchain.verify_dump(dump)["ok"]
    lines = dump.splitlines(keepends=True)
    lines[1] = lines[1].replace('"number":1', '"number":9')
    verdict = medchain.verify_dump("".join(lines))
    assert not verdict["ok"]
    assert verdict["bad_block"] == 1
    assert medchain.sha256_hex(b"abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


@pytest.mark.skipif("MEDCHAIN_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_binary_exit_codes(tmp_path):
    cli = os.environ["MEDCHAIN_CLI"]
    assert subprocess.run([cli, "--scenario", "9"], capture_output=True).returncode == 2
    done = subprocess.run([cli, "--scenario", "3", "--out", str(tmp_path), "--format", "json"], capture_output=True)
    assert done.returncode == 0
    ok = subprocess.run([cli, "verify", str(tmp_path / "scenario-3-1-channel-2.ledger")], capture_output=True, text=True)
    assert ok.returncode == 0
    assert ok.stdout.startswith("ok: ")
