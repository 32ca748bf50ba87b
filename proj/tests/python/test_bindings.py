import math

import pytest

import qdtraj


def test_experimental_box_has_hinge_and_slider():
    box = qdtraj.experimental_box()
    names = [j["name"] for j in box["joints"]]
    assert "hinge0" in names and "slider0" in names


def test_part_poses_are_unit_quaternions_with_nonnegative_w():
    box = qdtraj.experimental_box()
    for position, wxyz in qdtraj.part_poses(box, [0.7, 0.1]):
        assert len(position) == 3
        assert math.isclose(sum(c * c for c in wxyz), 1.0, rel_tol=0, abs_tol=1e-12)
        assert wxyz[0] >= 0.0


def test_segment_box_chord_axis_aligned():
    chord = qdtraj.segment_box_chord([-1, 0, 0], [1, 0, 0], [0.5, 0.5, 0.5], [0, 0, 0], [1, 0, 0, 0])
    assert chord == 1.0


def test_bin_descriptor_floors():
    assert qdtraj.bin_descriptor([0.015, -0.001, 0.0], 0.01) == [1, -1, 0]


def test_content_hash_fnv1a():
    assert qdtraj.content_hash("") == "cbf29ce484222325"
    assert qdtraj.content_hash("a") == "af63dc4c8601ec8c"


def test_parse_urdf_warns_on_unknown_tags(fixture_dir):
    obj, warnings = qdtraj.parse_urdf((fixture_dir / "slider_drawer.urdf").read_text())
    assert obj["joints"]
    assert isinstance(warnings, list)


def test_parse_urdf_errors_raise():
    with pytest.raises(qdtraj.QdtrajError):
        qdtraj.parse_urdf("<robot name='x'><link name='a'/>")


def test_adaptive_handle_grasp_closes_the_door():
    # Door at 90 degrees, TCP on the handle closing across its 2 cm side.
    # Rotation columns (-z, x, -y) as a quaternion.
    wxyz = [0.5, 0.5, 0.5, -0.5]
    r = qdtraj.evaluate(qdtraj.hinge_task(), [0.60, 0.25, 0.18], wxyz)
    assert r["grasp_success"]
    assert r["fitness"] == 1.0
    assert len(r["trajectory"]) == 101


def test_evaluate_failed_grasp_has_no_trajectory():
    r = qdtraj.evaluate(qdtraj.hinge_task(), [2.0, 2.0, 2.0], [1, 0, 0, 0])
    assert not r["grasp_success"]
    assert r["trajectory"] is None


def test_run_is_deterministic_and_reserializes():
    cfg = qdtraj.hinge_task(qd={"population_size": 32, "generations": 3, "workers": 1})
    _, text_a, metrics = qdtraj.run(cfg, seed=9)
    _, text_b, _ = qdtraj.run(cfg, seed=9)
    assert text_a == text_b
    assert len(metrics) == 4
    assert qdtraj.reserialize_archive(text_a) == text_a


def test_invalid_task_raises():
    with pytest.raises(qdtraj.QdtrajError):
        qdtraj.evaluate(qdtraj.hinge_task(joint="7"), [0, 0, 0], [1, 0, 0, 0])
