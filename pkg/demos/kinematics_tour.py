"""Forward and inverse kinematics of the simulated arm.

The arm is a 6-joint chain described by a standard DH table (the shipped
"cr4ia_like" config: 4 kg payload, ~0.6 m working radius).  Forward
kinematics maps joints to the tool pose; the damped-least-squares solver
inverts it.
"""
import numpy as np

from workcell.robot import default_model, fk, ik, orientation_error

model = default_model()
print(f"model: {model.name}, payload {model.payload_kg} kg, reach {model.reach_m} m")

# The home pose: all joints at zero leaves the tool pointing straight
# down at full stretch.
home = fk(model, np.zeros(6))
print("\nhome TCP position:", np.round(home.position, 4))
print("home TCP rotation:\n", np.round(home.rotation, 4))

# Pick a random reachable pose by sampling joints, then recover joints
# for it with the solver.  The recovered vector usually differs from the
# original (several joint configurations reach the same pose), but the
# pose itself matches to sub-0.1 mm.
rng = np.random.default_rng(4)
q_true = rng.uniform(model.limits_min, model.limits_max)
target = fk(model, q_true)
print("\ntarget position:", np.round(target.position, 4))

seed = np.array([0.0, 0.5, -0.5, 0.0, -0.5, 0.0])
q_solved = ik(model, target, seed)
reached = fk(model, q_solved)

print("sampled joints: ", np.round(q_true, 3))
print("solved joints:  ", np.round(q_solved, 3))
print("position error: ", np.linalg.norm(reached.position - target.position))
print("rotation error: ", np.linalg.norm(orientation_error(target.rotation, reached.rotation)))
