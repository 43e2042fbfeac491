"""Hand-written MiniC programs with hand-computed expected traces.

Each expected event is (kind, line, function, {name: (type, payload)});
array payloads are tuples of element payloads. These were worked out on
paper from the stepping rules before the interpreter existed - do not
regenerate them from interpreter output.
"""

S = 32767  # uninitialized-int sentinel
SC = S % 256  # uninitialized-char sentinel (255)
SF = 32767.0

FACTORIAL = """int fact(int n) {
    int x;
    int y;
    if (n < 0) {
        y = 0;
    } else {
        y = 1;
    }
    for (x = 1; x <= n; x = x + 1) {
        y = y * x;
    }
    return y;
}

int main() {
    int n;
    n = read_int();
    n = fact(n);
    print(n);
    return 0;
}
"""

FACTORIAL_EXPECTED_EVENTS = [
    ("param", 15, "main", {}),
    ("line", 16, "main", {"n": ("int", S)}),
    ("line", 17, "main", {"n": ("int", 5)}),
    ("param", 1, "fact", {"n": ("int", 5)}),
    ("line", 2, "fact", {"n": ("int", 5), "x": ("int", S)}),
    ("line", 3, "fact", {"n": ("int", 5), "x": ("int", S), "y": ("int", S)}),
    ("line", 4, "fact", {"n": ("int", 5), "x": ("int", S), "y": ("int", S)}),
    ("line", 7, "fact", {"n": ("int", 5), "x": ("int", S), "y": ("int", 1)}),
    ("line", 9, "fact", {"n": ("int", 5), "x": ("int", 1), "y": ("int", 1)}),
    ("line", 10, "fact", {"n": ("int", 5), "x": ("int", 1), "y": ("int", 1)}),
    ("line", 9, "fact", {"n": ("int", 5), "x": ("int", 2), "y": ("int", 1)}),
    ("line", 10, "fact", {"n": ("int", 5), "x": ("int", 2), "y": ("int", 2)}),
    ("line", 9, "fact", {"n": ("int", 5), "x": ("int", 3), "y": ("int", 2)}),
    ("line", 10, "fact", {"n": ("int", 5), "x": ("int", 3), "y": ("int", 6)}),
    ("line", 9, "fact", {"n": ("int", 5), "x": ("int", 4), "y": ("int", 6)}),
    ("line", 10, "fact", {"n": ("int", 5), "x": ("int", 4), "y": ("int", 24)}),
    ("line", 9, "fact", {"n": ("int", 5), "x": ("int", 5), "y": ("int", 24)}),
    ("line", 10, "fact", {"n": ("int", 5), "x": ("int", 5), "y": ("int", 120)}),
    ("line", 9, "fact", {"n": ("int", 5), "x": ("int", 6), "y": ("int", 120)}),
    ("line", 12, "fact", {"n": ("int", 5), "x": ("int", 6), "y": ("int", 120)}),
    ("line", 18, "main", {"n": ("int", 120)}),
    ("line", 19, "main", {"n": ("int", 120)}),
    ("line", 20, "main", {"n": ("int", 120)}),
]

FACTORIAL_COVERED = {1, 2, 3, 4, 7, 9, 10, 12, 15, 16, 17, 18, 19, 20}

MINIMAL = "int main(){return 0;}\n"
MINIMAL_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 1, "main", {}),
]

DECL_SENTINEL = """int main() {
    int x;
    return 0;
}
"""
DECL_SENTINEL_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"x": ("int", S)}),
    ("line", 3, "main", {"x": ("int", S)}),
]

WHILE_LOOP = """int main() {
    int i;
    i = 0;
    while (i < 3) {
        i = i + 1;
    }
    return i;
}
"""
WHILE_LOOP_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"i": ("int", S)}),
    ("line", 3, "main", {"i": ("int", 0)}),
    ("line", 4, "main", {"i": ("int", 0)}),
    ("line", 5, "main", {"i": ("int", 1)}),
    ("line", 4, "main", {"i": ("int", 1)}),
    ("line", 5, "main", {"i": ("int", 2)}),
    ("line", 4, "main", {"i": ("int", 2)}),
    ("line", 5, "main", {"i": ("int", 3)}),
    ("line", 4, "main", {"i": ("int", 3)}),
    ("line", 7, "main", {"i": ("int", 3)}),
]

MULTI_STMT_LINE = """int main() {
    int a; int b;
    a = 1; b = 2;
    return a + b;
}
"""
MULTI_STMT_LINE_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"a": ("int", S), "b": ("int", S)}),
    ("line", 3, "main", {"a": ("int", 1), "b": ("int", 2)}),
    ("line", 4, "main", {"a": ("int", 1), "b": ("int", 2)}),
]

SHADOW = """int main() {
    int x;
    x = 1;
    if (x > 0) {
        int x;
        x = 5;
    }
    return x;
}
"""
SHADOW_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"x": ("int", S)}),
    ("line", 3, "main", {"x": ("int", 1)}),
    ("line", 4, "main", {"x": ("int", 1)}),
    ("line", 5, "main", {"x": ("int", S)}),
    ("line", 6, "main", {"x": ("int", 5)}),
    ("line", 8, "main", {"x": ("int", 1)}),
]

IF_ELSE = """int main() {
    int v;
    v = read_int();
    if (v > 10) {
        v = v + 1;
    } else {
        v = v - 1;
    }
    return v;
}
"""
IF_ELSE_EXPECTED_INPUT_20 = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"v": ("int", S)}),
    ("line", 3, "main", {"v": ("int", 20)}),
    ("line", 4, "main", {"v": ("int", 20)}),
    ("line", 5, "main", {"v": ("int", 21)}),
    ("line", 9, "main", {"v": ("int", 21)}),
]

CALL_CHAR = """int twice(int k) {
    return k + k;
}

int main() {
    char c;
    int r;
    c = read_char();
    r = twice(c);
    return r;
}
"""
CALL_CHAR_EXPECTED_INPUT_A = [
    ("param", 5, "main", {}),
    ("line", 6, "main", {"c": ("char", SC)}),
    ("line", 7, "main", {"c": ("char", SC), "r": ("int", S)}),
    ("line", 8, "main", {"c": ("char", 65), "r": ("int", S)}),
    ("param", 1, "twice", {"k": ("int", 65)}),
    ("line", 2, "twice", {"k": ("int", 65)}),
    ("line", 9, "main", {"c": ("char", 65), "r": ("int", 130)}),
    ("line", 10, "main", {"c": ("char", 65), "r": ("int", 130)}),
]

FLOAT_MATH = """int main() {
    double d;
    d = read_float();
    d = d * 2.0;
    return 0;
}
"""
FLOAT_MATH_EXPECTED_INPUT_1_5 = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"d": ("double", SF)}),
    ("line", 3, "main", {"d": ("double", 1.5)}),
    ("line", 4, "main", {"d": ("double", 3.0)}),
    ("line", 5, "main", {"d": ("double", 3.0)}),
]

ARRAY_FOR = """int main() {
    int arr[3];
    int i;
    for (i = 0; i < 3; i = i + 1) {
        arr[i] = i * 2;
    }
    return arr[2];
}
"""
ARRAY_FOR_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"arr": ("int[3]", (S, S, S))}),
    ("line", 3, "main", {"arr": ("int[3]", (S, S, S)), "i": ("int", S)}),
    ("line", 4, "main", {"arr": ("int[3]", (S, S, S)), "i": ("int", 0)}),
    ("line", 5, "main", {"arr": ("int[3]", (0, S, S)), "i": ("int", 0)}),
    ("line", 4, "main", {"arr": ("int[3]", (0, S, S)), "i": ("int", 1)}),
    ("line", 5, "main", {"arr": ("int[3]", (0, 2, S)), "i": ("int", 1)}),
    ("line", 4, "main", {"arr": ("int[3]", (0, 2, S)), "i": ("int", 2)}),
    ("line", 5, "main", {"arr": ("int[3]", (0, 2, 4)), "i": ("int", 2)}),
    ("line", 4, "main", {"arr": ("int[3]", (0, 2, 4)), "i": ("int", 3)}),
    ("line", 7, "main", {"arr": ("int[3]", (0, 2, 4)), "i": ("int", 3)}),
]

ZERO_ITER_FOR = """int main() {
    int i;
    int s;
    s = 0;
    for (i = 5; i < 5; i = i + 1) {
        s = s + 1;
    }
    return s;
}
"""
ZERO_ITER_FOR_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"i": ("int", S)}),
    ("line", 3, "main", {"i": ("int", S), "s": ("int", S)}),
    ("line", 4, "main", {"i": ("int", S), "s": ("int", 0)}),
    ("line", 5, "main", {"i": ("int", 5), "s": ("int", 0)}),
    ("line", 8, "main", {"i": ("int", 5), "s": ("int", 0)}),
]

DIV_ZERO = """int main() {
    int a;
    a = read_int();
    a = 10 / a;
    return a;
}
"""
DIV_ZERO_EXPECTED_PREFIX = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"a": ("int", S)}),
    ("line", 3, "main", {"a": ("int", 0)}),
]

INFINITE = "int main(){while(1){}}\n"

READ_EMPTY = "int main(){int a; a = read_int(); return a;}\n"

NULL_DEREF = """int main() {
    int* p;
    int x;
    x = p[0];
    return x;
}
"""
NULL_DEREF_EXPECTED_PREFIX = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"p": ("int*", None)}),
    ("line", 3, "main", {"p": ("int*", None), "x": ("int", S)}),
]

POINTER_ALIAS = """int main() {
    int arr[2];
    int* p;
    arr[0] = 7;
    p = arr;
    arr[1] = p[0] + 1;
    return arr[1];
}
"""
POINTER_ALIAS_EXPECTED = [
    ("param", 1, "main", {}),
    ("line", 2, "main", {"arr": ("int[2]", (S, S))}),
    ("line", 3, "main", {"arr": ("int[2]", (S, S)), "p": ("int*", None)}),
    ("line", 4, "main", {"arr": ("int[2]", (7, S)), "p": ("int*", None)}),
    ("line", 5, "main", {"arr": ("int[2]", (7, S)), "p": ("int*", 1)}),
    ("line", 6, "main", {"arr": ("int[2]", (7, 8)), "p": ("int*", 1)}),
    ("line", 7, "main", {"arr": ("int[2]", (7, 8)), "p": ("int*", 1)}),
]

# (name, source, input text, expected events or None, expected error or None)
HAND_FIXTURES = [
    ("factorial_5", FACTORIAL, "5", FACTORIAL_EXPECTED_EVENTS, None),
    ("minimal", MINIMAL, "", MINIMAL_EXPECTED, None),
    ("decl_sentinel", DECL_SENTINEL, "", DECL_SENTINEL_EXPECTED, None),
    ("while_loop", WHILE_LOOP, "", WHILE_LOOP_EXPECTED, None),
    ("multi_stmt_line", MULTI_STMT_LINE, "", MULTI_STMT_LINE_EXPECTED, None),
    ("shadow", SHADOW, "", SHADOW_EXPECTED, None),
    ("if_else_20", IF_ELSE, "20", IF_ELSE_EXPECTED_INPUT_20, None),
    ("call_char_A", CALL_CHAR, "A", CALL_CHAR_EXPECTED_INPUT_A, None),
    ("float_math", FLOAT_MATH, "1.5", FLOAT_MATH_EXPECTED_INPUT_1_5, None),
    ("array_for", ARRAY_FOR, "", ARRAY_FOR_EXPECTED, None),
    ("zero_iter_for", ZERO_ITER_FOR, "", ZERO_ITER_FOR_EXPECTED, None),
    ("div_zero", DIV_ZERO, "0", DIV_ZERO_EXPECTED_PREFIX, "division_by_zero"),
    ("null_deref", NULL_DEREF, "", NULL_DEREF_EXPECTED_PREFIX, "null_dereference"),
    ("pointer_alias", POINTER_ALIAS, "", POINTER_ALIAS_EXPECTED, None),
]


def simplify_event(ev):
    def payload(value):
        if value.static_type.endswith("]"):
            return tuple(e.payload for e in value.payload)
        return value.payload

    return (
        ev.kind,
        ev.line,
        ev.function,
        {name: (value.static_type, payload(value)) for name, value in ev.vars.items()},
    )
