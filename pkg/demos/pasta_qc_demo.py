"""Pasta quality control: inspect a belt of pieces, divert the broken ones."""
from workcell.scenarios import BeltItem, data_path, load_scenario, run_pasta_qc_cycle

config = load_scenario(data_path("scenarios", "pasta.json"))
belt = [
    BeltItem("piece-1", good=True),
    BeltItem("piece-2", good=True),
    BeltItem("piece-3", good=False),
    BeltItem("piece-4", good=True),
    BeltItem("piece-5", good=False),
    BeltItem("piece-6", good=True),
]
print(f"inspecting {len(belt)} pieces at {config.extras['inspect_position']}; "
      f"divert bin at {config.drop_zone[:2]}\n")

report = run_pasta_qc_cycle(config, belt)
print(report.to_text())
