"""The synthetic vision pipeline, end to end.

A scene of tabletop objects is rasterized by a fixed top-down camera,
searched by normalized cross-correlation against a template library,
post-processed with NMS, and the winning boxes are mapped back to
workspace coordinates through the affine calibration.
"""
import numpy as np

from workcell.scenarios import data_path
from workcell.vision import (
    Annotation,
    CameraConfig,
    calibration_for_camera,
    detect,
    evaluate,
    load_template_library,
    pixel_to_robot,
    render,
    write_pgm,
)
from workcell.vision.scene import Scene, SceneObject

templates = load_template_library(data_path("templates"))
print("template library:", ", ".join(sorted(templates)))

camera = CameraConfig(width=96, height=96, origin=(0.22, -0.12), pixels_per_meter=400)
scene = Scene(
    extent=((0.22, -0.12), (0.46, 0.12)),
    objects=[
        SceneObject("pod-dark-1", "pod_dark", (0.40, 0.06), 0.03, "pod_dark"),
        SceneObject("pod-light-1", "pod_light", (0.40, -0.04), 0.03, "pod_light"),
        SceneObject("piece-1", "pasta_broken", (0.28, 0.02), 0.02, "pasta_broken"),
    ],
)

# a little sensor noise to make it interesting
frame = render(scene, camera, templates, noise_amplitude=0.03, seed=99)
write_pgm(frame, "frame.pgm")
print("wrote frame.pgm ({}x{})".format(*frame.shape[::-1]))

detections = detect(frame, templates, threshold=0.7)
calibration = calibration_for_camera(camera)
print("\ndetections:")
for d in detections:
    wx, wy = pixel_to_robot(calibration, d.box)
    print(f"  {d.label:13s} score {d.score:.3f} box {d.box} -> workspace ({wx:.3f}, {wy:.3f})")

# score against ground truth derived from the scene itself
truth = []
for obj in scene.objects:
    px, py = camera.project(obj.position)
    x0, y0 = int(np.floor(px)) - 4, int(np.floor(py)) - 4
    truth.append(Annotation((x0, y0, x0 + 9, y0 + 9), obj.label))
precision, recall = evaluate(detections, truth)
print(f"\nprecision {precision:.2f}, recall {recall:.2f} at IoU 0.5")
