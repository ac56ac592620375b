from __future__ import annotations

import json

import numpy as np
import pytest

from workcell.robot import (
    BadSafetyTransition,
    GripperMode,
    InfiniteLoopGuard,
    Interpreter,
    JointLimit,
    Safety,
    SafetyViolation,
    estop,
    export_trace,
    fk,
    home_state,
    inject_collision,
    parse_tp,
    restart,
    run_program,
    step,
)
from workcell.vision.scene import Scene, SceneObject

EXTENT = ((0.22, -0.12), (0.46, 0.12))


def make_scene(*objects):
    return Scene(extent=EXTENT, objects=list(objects))


def pod(object_id="pod-1", position=(0.34, 0.0), mass=0.03):
    return SceneObject(object_id, "pod_dark", position, mass, "pod_dark")


def drive(model, state, instruction, scene, max_ticks=10_000):
    """Run one instruction to completion through step()."""
    progress = None
    events = []
    for _ in range(max_ticks):
        outcome = step(model, state, instruction, scene, progress)
        state, progress = outcome.state, outcome.progress
        if outcome.event:
            events.append(outcome.event)
        if outcome.done:
            return state, events
    raise AssertionError("instruction did not finish")


class TestStep:
    def test_movej_to_current_joints_single_tick(self, model):
        state = home_state(model)
        scene = make_scene()
        outcome = step(model, state, parse_tp("MOVEJ 0 0 0 0 0 0").instructions[0], scene)
        assert outcome.done
        np.testing.assert_array_equal(outcome.state.joints, state.joints)

    def test_movej_respects_speed_limit(self, model):
        state = home_state(model)
        scene = make_scene()
        instr = parse_tp("MOVEJ 1.2 0 0 0 0 0").instructions[0]
        speeds = [j.max_speed for j in model.joints]
        progress = None
        prev = state
        for _ in range(200):
            outcome = step(model, prev, instr, scene, progress)
            delta = np.abs(outcome.state.joints - prev.joints)
            assert np.all(delta <= np.array(speeds) + 1e-15)
            prev, progress = outcome.state, outcome.progress
            if outcome.done:
                break
        assert prev.joints[0] == 1.2

    def test_movej_outside_limits(self, model):
        state = home_state(model)
        with pytest.raises(JointLimit):
            step(model, state, parse_tp("MOVEJ 9 0 0 0 0 0").instructions[0], make_scene())

    def test_movel_reaches_cartesian_target(self, model):
        state = home_state(model)
        instr = parse_tp("MOVEL 0.3 0.05 0.1 3.141592653589793 0 0").instructions[0]
        final, _ = drive(model, state, instr, make_scene())
        np.testing.assert_allclose(final.tcp.position, [0.3, 0.05, 0.1], atol=2e-4)

    def test_open_while_empty_is_noop(self, model):
        state = home_state(model)
        final, events = drive(model, state, parse_tp("OPEN").instructions[0], make_scene())
        assert final.gripper.aperture == model.gripper.max_open
        assert final.gripper.mode is GripperMode.OPEN
        assert events == []

    def test_close_with_no_object_nearby(self, model):
        state = home_state(model)
        final, events = drive(model, state, parse_tp("CLOSE").instructions[0], make_scene())
        assert final.gripper.mode is GripperMode.CLOSED
        assert not final.gripper.holding
        assert events == []

    def test_close_grasps_nearest_object(self, model):
        state = home_state(model)  # tcp at (0.34, 0, -0.07)
        scene = make_scene(pod("near", (0.345, 0.0)), pod("far", (0.40, 0.1)))
        final, events = drive(model, state, parse_tp("CLOSE").instructions[0], scene)
        assert final.gripper.holding
        assert final.attached.object_id == "near"
        assert events == [{"type": "grasp", "object": "near", "mass_kg": 0.03}]
        # object snapped to the tcp
        assert scene.get("near").position == pytest.approx((0.34, 0.0))

    def test_grasp_tie_breaks_by_object_id(self, model):
        state = home_state(model)
        scene = make_scene(pod("b", (0.345, 0.0)), pod("a", (0.335, 0.0)))
        final, _ = drive(model, state, parse_tp("CLOSE").instructions[0], scene)
        assert final.attached.object_id == "a"

    def test_overweight_object_trips_payload_fault(self, model):
        state = home_state(model)
        scene = make_scene(pod("brick", (0.34, 0.0), mass=5.0))
        outcome = step(model, state, parse_tp("CLOSE").instructions[0], scene)
        assert outcome.state.safety is Safety.COLLISION_STOPPED
        assert not outcome.state.gripper.holding
        assert outcome.event["type"] == "payload_fault"
        assert outcome.event["limit_kg"] == 4.0

    def test_object_tracks_tcp_while_held(self, model):
        state = home_state(model)
        scene = make_scene(pod())
        state, _ = drive(model, state, parse_tp("CLOSE").instructions[0], scene)
        instr = parse_tp("MOVEJ 0.3 0 0 0 0 0").instructions[0]
        progress = None
        for _ in range(100):
            outcome = step(model, state, instr, scene, progress)
            state, progress = outcome.state, outcome.progress
            assert scene.get("pod-1").position == pytest.approx(
                (state.tcp.position[0], state.tcp.position[1])
            )
            if outcome.done:
                break

    def test_release_places_object_at_tcp(self, model):
        state = home_state(model)
        scene = make_scene(pod())
        state, _ = drive(model, state, parse_tp("CLOSE").instructions[0], scene)
        state, _ = drive(model, state, parse_tp("MOVEJ 0.2 0 0 0 0 0").instructions[0], scene)
        final, events = drive(model, state, parse_tp("OPEN").instructions[0], scene)
        assert not final.gripper.holding
        assert final.attached is None
        assert events[0]["type"] == "release"
        assert scene.get("pod-1").position == pytest.approx(
            (final.tcp.position[0], final.tcp.position[1])
        )

    def test_motion_refused_while_stopped(self, model):
        state = estop(home_state(model))
        with pytest.raises(SafetyViolation):
            step(model, state, parse_tp("MOVEJ 0 0 0 0 0 0").instructions[0], make_scene())
        with pytest.raises(SafetyViolation):
            step(model, state, parse_tp("CLOSE").instructions[0], make_scene())

    def test_wait_counts_ticks(self, model):
        state = home_state(model)
        scene = make_scene()
        instr = parse_tp("WAIT 3").instructions[0]
        progress = None
        ticks = 0
        done = False
        while not done:
            outcome = step(model, state, instr, scene, progress)
            progress, done = outcome.progress, outcome.done
            ticks += 1
        assert ticks == 3

    def test_callws_emits_event(self, model):
        state = home_state(model)
        _, events = drive(model, state, parse_tp("CALLWS actuator").instructions[0], make_scene())
        assert events == [{"type": "ws_call", "endpoint": "actuator"}]


class TestRunProgram:
    def test_empty_program(self, model):
        state = home_state(model)
        trace = run_program(model, state, parse_tp(""), make_scene())
        assert trace == []

    def test_trace_ticks_strictly_increase(self, model):
        trace = run_program(
            model, home_state(model), parse_tp("MOVEJ 0.5 0.3 0 0 0 0\nWAIT 2\nOPEN"), make_scene()
        )
        ticks = [e.tick for e in trace]
        assert ticks == sorted(set(ticks))

    def test_tcp_consistent_with_fk_everywhere(self, model):
        trace = run_program(
            model, home_state(model), parse_tp("MOVEJ 0.6 0.4 -0.3 0.2 -0.5 0.4"), make_scene()
        )
        for entry in trace:
            np.testing.assert_allclose(
                entry.state.tcp.position, fk(model, entry.state.joints).position, atol=1e-12
            )

    def test_joint_limits_never_violated(self, model):
        trace = run_program(
            model,
            home_state(model),
            parse_tp("MOVEJ 1.5 1.0 -1.0 2.0 -1.5 3.0\nMOVEJ -1.5 -0.5 1.0 -2.0 1.5 -3.0"),
            make_scene(),
        )
        for entry in trace:
            assert model.within_limits(entry.state.joints)

    def test_infinite_loop_guard(self, model):
        program = parse_tp("LABEL a\nJMP a")
        with pytest.raises(InfiniteLoopGuard):
            run_program(model, home_state(model), program, make_scene(), tick_budget=500)

    def test_jump_skips_and_loops(self, model):
        # skip the CLOSE by jumping over it
        program = parse_tp("JMP end\nCLOSE\nLABEL end\nOPEN")
        scene = make_scene(pod())
        trace = run_program(model, home_state(model), program, make_scene(pod()))
        states = [e.state for e in trace]
        assert not any(s.gripper.holding for s in states)

    def test_pick_and_place_moves_object(self, model):
        # six-step pick: approach, descend, grasp, lift, carry, release
        script = (
            "MOVEL 0.34 0.0 0.07 3.141592653589793 0.0 0.0\n"
            "MOVEL 0.34 0.0 0.02 3.141592653589793 0.0 0.0\n"
            "CLOSE\n"
            "MOVEL 0.34 0.0 0.07 3.141592653589793 0.0 0.0\n"
            "MOVEL 0.26 -0.10 0.02 3.141592653589793 0.0 0.0\n"
            "OPEN\n"
        )
        scene = make_scene(pod())
        trace = run_program(model, home_state(model), parse_tp(script), scene)
        final = trace[-1].state
        assert not final.gripper.holding
        assert scene.get("pod-1").position == pytest.approx((0.26, -0.10), abs=1e-3)
        grasps = [e for e in trace if e.event and e.event["type"] == "grasp"]
        releases = [e for e in trace if e.event and e.event["type"] == "release"]
        assert len(grasps) == 1 and len(releases) == 1

    def test_payload_fault_halts_program(self, model):
        script = "CLOSE\nWAIT 5\n"
        scene = make_scene(pod("brick", (0.34, 0.0), mass=4.5))
        trace = run_program(model, home_state(model), parse_tp(script), scene)
        assert trace[-1].state.safety is Safety.COLLISION_STOPPED
        # halted right at the fault, the WAIT never ran
        assert len(trace) == 1


class TestSafety:
    def test_inject_freezes_joints_thereafter(self, model):
        program = parse_tp("MOVEL 0.30 0.05 0.05 3.141592653589793 0 0")
        interp = Interpreter(model, program, make_scene())
        for _ in range(4):
            interp.tick()
        interp.inject_collision()
        frozen = interp.state.joints.copy()
        entries = [interp.tick() for _ in range(10)]
        for entry in entries:
            np.testing.assert_array_equal(entry.state.joints, frozen)
            assert entry.state.safety is Safety.COLLISION_STOPPED

    def test_restart_resumes_to_identical_final_pose(self, model):
        script = "MOVEL 0.30 0.06 0.05 3.141592653589793 0 0\nMOVEJ 0.2 0.4 -0.3 0.1 -0.4 0.2"
        baseline = run_program(model, home_state(model), parse_tp(script), make_scene())
        interp = Interpreter(model, parse_tp(script), make_scene())
        for _ in range(7):
            interp.tick()
        interp.inject_collision()
        for _ in range(5):  # stopped time passes
            interp.tick()
        interp.restart()
        while not interp.finished:
            interp.tick()
        np.testing.assert_array_equal(interp.state.joints, baseline[-1].state.joints)

    def test_restart_while_running_rejected(self, model):
        with pytest.raises(BadSafetyTransition):
            restart(home_state(model))

    def test_estop_then_restart(self, model):
        state = estop(home_state(model))
        assert state.safety is Safety.ESTOPPED
        assert restart(state).safety is Safety.RUNNING

    def test_inject_collision_only_from_running(self, model):
        state = estop(home_state(model))
        assert inject_collision(state).safety is Safety.ESTOPPED


class TestTraceExport:
    def test_jsonl_records(self, model, tmp_path):
        trace = run_program(
            model, home_state(model), parse_tp("MOVEJ 0.3 0 0 0 0 0\nCALLWS ws"), make_scene()
        )
        path = tmp_path / "trace.jsonl"
        export_trace(trace, path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(trace)
        first = json.loads(lines[0])
        assert set(first) == {"tick", "joints", "tcp", "safety", "event"}
        last = json.loads(lines[-1])
        assert last["event"] == {"type": "ws_call", "endpoint": "ws"}
