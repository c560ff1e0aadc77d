import json

import pytest

from groupwindows import fileio
from groupwindows.cli import main
from groupwindows.errors import InputError

SHIFT_TEMPLATE = {
    "component_template": {"period": 1, "orders": [[4]]},
    "fixed_generators": [{"support": {"1": [2], "2": [1]}}],
    "shifted_generators": [{"start": 2, "stride": 1, "pattern": {"0": [1], "1": [1]}}],
}


@pytest.fixture
def template_path(tmp_path):
    path = tmp_path / "template.json"
    path.write_text(json.dumps(SHIFT_TEMPLATE))
    return str(path)


def write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_check_running_example_fails_every_window(template_path, tmp_path):
    for n in (4, 6, 8):
        out = tmp_path / f"cert{n}.json"
        code = main(
            [
                "check",
                "--input", template_path,
                "--property", "order-controllable",
                "--window", str(n),
                "--out", str(out),
            ]
        )
        assert code == 1
        cert = json.loads(out.read_text())
        assert cert["status"] == "fails"
        assert "witness" in cert
        assert cert["witness_context"]["projection_order"] == 2


def test_check_rectangular_group_holds(tmp_path):
    path = write(
        tmp_path,
        "rect.json",
        {"components": [[4], [2], [4]], "generators": [
            [[1], [0], [0]], [[0], [1], [0]], [[0], [0], [1]],
        ]},
    )
    out = tmp_path / "cert.json"
    code = main(["check", "--input", path, "--property", "order-controllable", "--out", str(out)])
    assert code == 0
    cert = json.loads(out.read_text())
    assert cert["status"] == "holds"
    assert cert["indices"] == {"1": 1, "2": 2}


def test_check_margin_consumes_window(template_path, tmp_path):
    path = write(
        tmp_path,
        "wide.json",
        {
            "component_template": {"period": 1, "orders": [[2]]},
            "fixed_generators": [{"support": {"1": [1], "4": [1]}}],
            "shifted_generators": [],
        },
    )
    code = main(["check", "--input", path, "--property", "weakly-controllable", "--window", "4"])
    assert code == 2


def test_check_malformed_residue_exits_3(tmp_path, capsys):
    path = write(tmp_path, "bad.json", {"components": [[4]], "generators": [[[4]]]})
    code = main(["check", "--input", path, "--property", "rectangular"])
    assert code == 3
    err = capsys.readouterr().err
    assert "generators[0][0][0]" in err and "residue 4" in err


def test_unroll_running_example(template_path, tmp_path):
    out = tmp_path / "g3.json"
    assert main(["unroll", "--input", template_path, "--window", "3", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["components"] == [[4], [4], [4]]
    assert payload["generators"] == [[[2], [1], [0]], [[0], [1], [1]]]
    assert payload["meta"]["skipped"] == [{"pattern": "shifted[0]", "start": 3}]


def test_unroll_empty_template(tmp_path):
    path = write(
        tmp_path,
        "empty.json",
        {"component_template": {"period": 1, "orders": [[4]]}},
    )
    out = tmp_path / "g5.json"
    assert main(["unroll", "--input", path, "--window", "5", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["generators"] == []


def test_unroll_window_below_fixed_support(template_path):
    assert main(["unroll", "--input", template_path, "--window", "1"]) == 3


def test_synthesize_crt_window_emits_two_encoders(tmp_path):
    path = write(tmp_path, "z6.json", {"components": [[2, 3]], "generators": [[[1, 0]], [[0, 1]]]})
    out = tmp_path / "enc.json"
    assert main(["synthesize", "--input", path, "--out", str(out)]) == 0
    manifest = json.loads(out.read_text())
    assert manifest["primes"] == [2, 3]
    assert sorted(manifest["files"]) == ["2", "3"]
    for p in ("2", "3"):
        enc = json.loads((tmp_path / manifest["files"][p]).read_text())
        assert len(enc["generators"]) == 1
    assert manifest["verdicts"]["isomorphic_encoder"] is True


def test_synthesize_running_example_fails_without_override(template_path, tmp_path):
    out = tmp_path / "enc.json"
    code = main(
        ["synthesize", "--input", template_path, "--window", "6", "--out", str(out)]
    )
    assert code == 1
    assert not (tmp_path / "enc.p2.json").exists()


def test_synthesize_verify_round_trip_on_closure(template_path, tmp_path):
    group_path = tmp_path / "c8.json"
    assert main(
        ["unroll", "--input", template_path, "--window", "8", "--closure", "--out", str(group_path)]
    ) == 0
    out = tmp_path / "enc.json"
    assert main(["synthesize", "--input", str(group_path), "--out", str(out)]) == 0
    report = tmp_path / "report.json"
    assert main(
        ["verify", "--input", str(group_path), "--encoder", str(out), "--out", str(report)]
    ) == 0
    payload = json.loads(report.read_text())
    assert payload["pass"] is True
    assert payload["combined"]["bijective"] is True


def test_verify_flags_tampered_height(template_path, tmp_path):
    group_path = tmp_path / "c6.json"
    main(["unroll", "--input", template_path, "--window", "6", "--closure", "--out", str(group_path)])
    out = tmp_path / "enc.json"
    main(["synthesize", "--input", str(group_path), "--out", str(out)])
    enc_path = tmp_path / "enc.p2.json"
    enc = json.loads(enc_path.read_text())
    enc["heights"][1] += 1
    enc["orders"][1] *= 2
    enc_path.write_text(json.dumps(enc))
    report = tmp_path / "report.json"
    code = main(["verify", "--input", str(group_path), "--encoder", str(out), "--out", str(report)])
    assert code == 1
    payload = json.loads(report.read_text())
    flagged = [k for k, v in payload["parts"]["2"].items() if not v["pass"]]
    assert "d" in flagged or "e" in flagged


def test_verify_shape_mismatch_exits_3(template_path, tmp_path):
    group_path = tmp_path / "c6.json"
    main(["unroll", "--input", template_path, "--window", "6", "--closure", "--out", str(group_path)])
    out = tmp_path / "enc.json"
    main(["synthesize", "--input", str(group_path), "--out", str(out)])
    other = write(tmp_path, "other.json", {"components": [[2], [2]], "generators": [[[1], [0]]]})
    assert main(["verify", "--input", other, "--encoder", str(out)]) == 3


def test_decompose_crt_window(tmp_path, capsys):
    path = write(tmp_path, "z6.json", {"components": [[2, 3]], "generators": [[[1, 1]]]})
    out = tmp_path / "dec.json"
    assert main(["decompose", "--input", path, "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["primes"] == [2, 3]
    assert payload["order"] == 6
    assert payload["parts"]["2"]["order"] == 2
    assert payload["parts"]["3"]["order"] == 3


def test_outputs_byte_identical_across_runs(template_path, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        main(
            [
                "check",
                "--input", template_path,
                "--property", "order-controllable",
                "--window", "6",
                "--out", str(out),
            ]
        )
    assert a.read_bytes() == b.read_bytes()


def test_certificates_embed_input_hash_and_revalidate(template_path, tmp_path):
    out = tmp_path / "cert.json"
    main(
        [
            "check",
            "--input", template_path,
            "--property", "order-controllable",
            "--window", "6",
            "--out", str(out),
        ]
    )
    cert = json.loads(out.read_text())
    assert cert["input_sha256"] == fileio.sha256_of(SHIFT_TEMPLATE)
    # replay the witness against the unrolled group through the library
    from groupwindows import Certificate, unroll_template, revalidate_witness

    template = fileio.parse_template(SHIFT_TEMPLATE)
    g = unroll_template(template, 6).group
    witness = g.window.element(cert["witness"])
    replay = Certificate(
        property=cert["property"],
        window=cert["window"],
        status=cert["status"],
        indices={int(k): v for k, v in cert["indices"].items()},
        witness=witness,
        witness_context={
            "i": cert["witness_context"]["i"],
            "n": cert["witness_context"]["n"],
        },
        stabilization={int(k): v for k, v in cert["stabilization"].items()},
        notes={},
    )
    assert revalidate_witness(replay, g)


def test_encoder_file_round_trip(template_path, tmp_path):
    group_path = tmp_path / "c6.json"
    main(["unroll", "--input", template_path, "--window", "6", "--closure", "--out", str(group_path)])
    out = tmp_path / "enc.json"
    main(["synthesize", "--input", str(group_path), "--out", str(out)])
    gs, window, coords = fileio.load_encoder_file(str(tmp_path / "enc.p2.json"))
    group = fileio.load_group_file(str(group_path))
    assert window == group.window
    assert coords == list(range(1, 7))
    from groupwindows import verify_block_properties, verify_isomorphic_encoder

    assert verify_block_properties(gs, group).passed()
    assert verify_isomorphic_encoder(gs, group)


def test_template_json_parse_errors_name_positions(tmp_path):
    path = write(tmp_path, "t.json", {"component_template": {"period": 1}})
    with pytest.raises(InputError, match="component_template.orders"):
        fileio.load_template_file(path)
    bad = tmp_path / "nota.json"
    bad.write_text("{not json")
    with pytest.raises(InputError, match="line 1"):
        fileio.load_json(str(bad))


def test_synthesize_override_on_undetermined_window(tmp_path):
    # a fixed generator spanning the whole window consumes the margin; the
    # certificate is undetermined, and only the override lets synthesis run
    path = write(
        tmp_path,
        "wide.json",
        {
            "component_template": {"period": 1, "orders": [[2]]},
            "fixed_generators": [{"support": {"1": [1], "4": [1]}}],
            "shifted_generators": [],
        },
    )
    out = tmp_path / "enc.json"
    assert main(["synthesize", "--input", path, "--window", "4", "--out", str(out)]) == 2
    code = main(
        ["synthesize", "--input", path, "--window", "4", "--out", str(out),
         "--override-undetermined"]
    )
    assert code == 0
    manifest = json.loads(out.read_text())
    assert manifest["verdicts"]["determined"] is False
    assert manifest["verdicts"]["isomorphic_encoder"] is True
