from genregress.staticcheck.blocks import iter_statements, parse_blocks


def test_module_level_statements():
    stmts = parse_blocks("x = 1\ny = 2\n")
    assert [s.kind for s in stmts] == ["simple", "simple"]
    assert [s.depth for s in stmts] == [0, 0]


def test_suite_nesting_and_depth():
    stmts = parse_blocks("def f(a):\n    if a:\n        return 1\n    return 0\n")
    func = stmts[0]
    assert func.kind == "def"
    assert [s.kind for s in func.body] == ["if", "simple"]
    inner = func.body[0]
    assert inner.depth == 1
    assert inner.body[0].depth == 2


def test_else_attaches_to_if():
    stmts = parse_blocks(
        "if a:\n    x = 1\nelif b:\n    x = 2\nelse:\n    x = 3\n"
    )
    assert len(stmts) == 1
    chain = stmts[0]
    assert [c.kind for c in chain.clauses] == ["elif", "else"]
    assert chain.clauses[1].body[0].header[0].text == "x"


def test_except_finally_attach_to_try():
    stmts = parse_blocks(
        "try:\n    risky()\nexcept ValueError:\n    pass\nfinally:\n    done()\n"
    )
    assert len(stmts) == 1
    assert [c.kind for c in stmts[0].clauses] == ["except", "finally"]


def test_for_else_attaches_to_for():
    stmts = parse_blocks("for i in items:\n    use(i)\nelse:\n    done()\n")
    assert len(stmts) == 1
    assert stmts[0].kind == "for"
    assert [c.kind for c in stmts[0].clauses] == ["else"]


def test_inline_suite_split():
    stmts = parse_blocks("if x: a = 1; b = 2\n")
    assert len(stmts) == 1
    body = stmts[0].body
    assert [s.header[0].text for s in body] == ["a", "b"]
    assert all(s.depth == 1 for s in body)


def test_dangling_header_flagged():
    stmts = parse_blocks("while True:\n")
    assert stmts[0].dangling


def test_lambda_colon_does_not_open_suite():
    stmts = parse_blocks("if (lambda v: v)(1):\n    x = 1\n")
    assert stmts[0].kind == "if"
    assert len(stmts[0].body) == 1


def test_source_order_preserved():
    source = (
        "first = 1\n"
        "def f(a):\n"
        "    second = 2\n"
        "    if a:\n"
        "        third = 3\n"
        "    else:\n"
        "        fourth = 4\n"
        "fifth = 5\n"
    )
    lines = [s.start_line for s in iter_statements(parse_blocks(source))]
    assert lines == sorted(lines)
    assert len(lines) == 8  # the else clause is itself a statement


def test_end_line_spans_suite():
    stmts = parse_blocks("def f():\n    a = 1\n    b = 2\n")
    assert stmts[0].start_line == 1
    assert stmts[0].end_line == 3


def test_multiline_header_via_brackets():
    stmts = parse_blocks("def f(\n    a,\n    b,\n):\n    return a + b\n")
    assert stmts[0].kind == "def"
    assert len(stmts[0].body) == 1
    assert stmts[0].body[0].start_line == 5
