import json
from pathlib import Path
from pprint import pprint

from rigidity.oracles import OracleSpec
from rigidity.rigidify import RigidifyConfig, rigidify_ordered_graph, rigidify_tournament
from rigidity.structures import canonical_json

golden_dir = Path(__file__).parent
# name -> construction, oracle, targets and the facts every report must show
configs = json.loads((golden_dir / "index.json").read_text(encoding="utf-8"))

summary = {}
for name, entry in configs.items():
    cfg = RigidifyConfig(oracle=OracleSpec.parse(entry["oracle"]), targets=tuple(entry["targets"]))
    if entry["construction"] == "tournament":
        report = rigidify_tournament(cfg)
    else:
        report = rigidify_ordered_graph(cfg)
    payload = {"config": cfg.to_json() | {"construction": entry["construction"]}, "result": report.to_json()}
    (golden_dir / f"{name}.json").write_text(canonical_json(payload) + "\n", encoding="utf-8")
    summary[name] = {"size": report.size, "bound respected": report.within_bound}

pprint(summary)
