"""The coffee-pod cell, end to end: chat in, pod at the drop zone out."""
from workcell.scenarios import data_path, load_scenario, run_coffee_scenario

config = load_scenario(data_path("scenarios", "coffee.json"))
print(f"scenario {config.name!r}: {len(config.scene.objects)} pods on the table, "
      f"drop zone at {config.drop_zone[:2]}")

print("\n=== one-utterance order ===")
run = run_coffee_scenario(config, ["make me a short strong coffee with balanced aroma and no sugar"])
print(run.transcript)
print(f"prompts: {run.prompts}, job: {run.job['state']}, picked: {run.picked_object}")
print("dispatch params:", run.dispatch["params"])

print("\n=== order with missing fields (the bot asks) ===")
config = load_scenario(data_path("scenarios", "coffee.json"))
run = run_coffee_scenario(config, ["i want a mild coffee with one sugar", "light", "long"])
print(run.transcript)
print(f"prompts: {run.prompts}, picked: {run.picked_object}")

print("\n=== ordering a pod that is not on the table ===")
config = load_scenario(data_path("scenarios", "coffee.json"))
run = run_coffee_scenario(
    config,
    ["make me a short decaf coffee with balanced aroma and no sugar"],
    expect="not_found",
)
print(run.transcript)
print(f"job: {run.job['state']} ({run.job['result']['reason']})")
