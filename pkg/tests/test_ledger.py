from rigidity.ledger import BuildLedger


def test_entries_are_numbered_in_order():
    ledger = BuildLedger()
    ledger.add_block("V_01", [3, 4], "0->V->1", naturals=[17, 21])
    ledger.note("certificate", verdict="accepted")
    assert [entry["#"] for entry in ledger.entries] == [0, 1]
    assert ledger.blocks() == [
        {"#": 0, "type": "block", "block": "V_01", "role": "0->V->1", "members": [3, 4], "size": 2, "info": {"naturals": [17, 21]}}
    ]
    assert ledger.block_members() == [3, 4]
    assert ledger.to_json()[1] == {"#": 1, "type": "certificate", "info": {"verdict": "accepted"}}


def test_jsonl_round_trip(tmp_path):
    ledger = BuildLedger()
    ledger.add_block("P_01", (5,), "Γ(0)∖Γ(1)")
    ledger.note("drop", attempt=0, block="P_02")
    file = tmp_path / "runs" / "ledger.jsonl"
    ledger.write_jsonl(file)
    assert len(file.read_text(encoding="utf-8").splitlines()) == 2
    assert BuildLedger.from_jsonl(file) == ledger
