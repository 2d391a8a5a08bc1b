import pytest

import jcave


def test_jewel_values():
    assert jcave.jewel_value(0, 0) == 10
    assert jcave.jewel_value(5, 2) == 80


def test_outcome():
    assert jcave.evaluate_outcome(5, 50, 5) == "won"
    assert jcave.evaluate_outcome(10, 40, 5) == "lost"
    assert jcave.evaluate_outcome(4, 40, 5) == "ongoing"


def test_recognize_synthesized_repetition():
    stream = jcave.synthesize(reps=2)
    report = jcave.recognize(stream)
    assert report["recognition"]["repetitions"] == 2
    assert report["recognition"]["reps"][0]["status"] == "Succeeded"


def test_mirrored_arm_recognizes_too():
    stream = jcave.synthesize(exercise="shoulder", arm="left")
    assert jcave.recognize(stream, exercise="shoulder", arm="left")["recognition"]["repetitions"] == 1
    assert jcave.recognize(stream, exercise="shoulder", arm="right")["recognition"]["repetitions"] == 0


def test_classify_first_frame_is_down():
    first = jcave.synthesize().splitlines()[0]
    assert jcave.classify(first) == "down"


def test_simulate_reports_outcome():
    report = jcave.simulate(jcave.synthesize(reps=3), n=3, sublevel="1-4")
    assert report["outcome"] == "won"
    assert report["nofer"] == 3


def test_bad_input_raises():
    with pytest.raises(ValueError):
        jcave.recognize("", exercise="knee")
    with pytest.raises(Exception):
        jcave.recognize("t=0 Head=1,2,3\n")
