"""The command gateway over its wire protocol.

Starts the full service in-process on an ephemeral port, then drives it
exactly the way a channel adapter or the operator console would: POST
/v1/command, poll /v1/status and /v1/events, POST /v1/control.
"""
from workcell.gateway.http import serve
from workcell.scenarios import GatewayClient, build_service, data_path, load_scenario

config = load_scenario(data_path("scenarios", "coffee.json"))
service = build_service(config)
server, _ = serve(service)
client = GatewayClient(f"http://127.0.0.1:{server.port}")
print(f"gateway up on port {server.port}")

try:
    reply = client.command("operator", "make me a short strong coffee with balanced aroma and no sugar")
    print("\nreply:", reply["reply"])
    job_id = reply["job_id"]

    outcome = client.wait_for_job(job_id)
    print(f"job {job_id}: {outcome['state']} ({outcome['result'].get('reason')})")

    status = client.status()
    print("robot safety:", status["robot"]["safety"])
    print("tcp:", [round(v, 3) for v in status["robot"]["tcp"]["position"]])

    # safety controls work between any two simulation ticks
    print("\ne-stop:", client.control("estop"))
    print("restart:", client.control("restart"))

    # the event log is the audit trail: dense, append-only sequence numbers
    events = client.all_events()
    kinds = {}
    for event in events:
        kinds[event["payload"].get("type")] = kinds.get(event["payload"].get("type"), 0) + 1
    print(f"\n{len(events)} events by type: {kinds}")

    # duplicate delivery of the same (session, tick) returns the same reply
    dup = client.command("operator", "ignored text", tick=1)
    print("duplicate (session, tick=1) reply matches:", dup == reply)
finally:
    server.shutdown()
    service.close()
