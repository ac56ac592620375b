from __future__ import annotations

import pytest

from workcell.vision import Annotation, AnnotationSet, Detection, evaluate, load_annotations, save_annotations


def det(box, label="pod", score=0.9):
    return Detection(box, label, score)


def ann(box, label="pod"):
    return Annotation(box, label)


class TestEvaluate:
    def test_exact_match(self):
        boxes = [(0, 0, 9, 9), (20, 20, 29, 29)]
        p, r = evaluate([det(b) for b in boxes], [ann(b) for b in boxes])
        assert (p, r) == (1.0, 1.0)

    def test_no_detections_convention(self):
        p, r = evaluate([], [ann((0, 0, 9, 9))])
        assert (p, r) == (1.0, 0.0)

    def test_no_annotations_convention(self):
        p, r = evaluate([det((0, 0, 9, 9))], [])
        assert (p, r) == (0.0, 1.0)

    def test_one_of_two_found(self):
        truths = [ann((0, 0, 9, 9)), ann((30, 30, 39, 39))]
        p, r = evaluate([det((0, 0, 9, 9))], truths)
        assert (p, r) == (1.0, 0.5)

    def test_wrong_class_not_matched(self):
        p, r = evaluate([det((0, 0, 9, 9), label="a")], [ann((0, 0, 9, 9), label="b")])
        assert (p, r) == (0.0, 0.0)

    def test_each_annotation_matches_once(self):
        truth = [ann((0, 0, 9, 9))]
        dets = [det((0, 0, 9, 9), score=0.9), det((1, 1, 10, 10), score=0.8)]
        p, r = evaluate(dets, truth)
        assert (p, r) == (0.5, 1.0)

    def test_iou_threshold_respected(self):
        # boxes overlap at iou 1/7 < 0.5: no match
        p, r = evaluate([det((0, 0, 2, 2))], [ann((1, 1, 3, 3))])
        assert (p, r) == (0.0, 0.0)

    def test_accepts_annotation_set(self):
        aset = AnnotationSet("img-1", (ann((0, 0, 9, 9)),))
        assert evaluate([det((0, 0, 9, 9))], aset) == (1.0, 1.0)


class TestAnnotationIo:
    def test_round_trip(self, tmp_path):
        aset = AnnotationSet(
            "frame-007",
            (ann((1.0, 2.0, 10.0, 12.0), "pod_dark"), ann((30.0, 5.0, 39.0, 14.0), "pod_light")),
        )
        path = tmp_path / "frame-007.json"
        save_annotations(aset, path)
        assert load_annotations(path) == aset

    def test_missing_keys_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"annotations": []}')
        with pytest.raises(ValueError):
            load_annotations(path)
