"""The built-in rewrite rules.

Every rule here is checked by ``check-rules`` (and the test-suite) against the
reference evaluator: it must preserve values, assertion verdicts and error
classes. Rules that could turn an erroring expression into a succeeding one
(e.g. ``(?a * 0) -> 0``) or vice versa are deliberately absent, as are
identities that fail once bitwise results are reduced mod p (associativity
of ``|``/``^``, double complement).
"""

DEFAULT_RULES = r"""
# identity elements
{"one-plus-zero", "1", "(1 + 0)"}
{"any-plus-zero", "?a", "(?a + 0)"}
{"zero-plus-any", "?a", "(0 + ?a)"}
{"any-minus-zero", "?a", "(?a - 0)"}
{"any-mul-one", "?a", "(?a * 1)"}
{"one-mul-any", "?a", "(1 * ?a)"}
{"any-div-one", "?a", "(?a / 1)"}
{"any-pow-one", "?a", "(?a ** 1)"}
{"zero-or", "?a", "(?a | 0)"}
{"or-zero-left", "?a", "(0 | ?a)"}
{"zero-xor", "?a", "(?a ^ 0)"}
{"xor-zero-left", "?a", "(0 ^ ?a)"}
{"self-and", "?a", "(?a & ?a)"}
{"self-or", "?a", "(?a | ?a)"}
{"double-neg", "?a", "(- (- ?a))"}
{"neg-neg-sub", "?a", "(0 - (0 - ?a))"}
{"sub-add-random-value", "?a", "((?a - $r) + $r)"}
{"add-sub-random-value", "?a", "((?a + $r) - $r)"}
{"cond-true-any", "?a", "(1 ? ?a : $r)"}
{"cond-false-any", "?a", "(0 ? $r : ?a)"}
{"cond-random-same", "?a", "($c:bool ? ?a : ?a)"}

# constants
{"one-minus-zero", "1", "(1 - 0)"}
{"one-times-one", "1", "(1 * 1)"}
{"one-div-one", "1", "(1 / 1)"}
{"one-pow-zero", "1", "($r ** 0)"}
{"one-eq-random", "1", "($r == $r)"}
{"one-le-random", "1", "($r <= $r)"}
{"one-ge-random", "1", "($r >= $r)"}
{"one-lor-random", "1", "($r:bool || 1)"}
{"one-not-zero", "1", "(! 0)"}
{"zero-sub-random", "0", "($r - $r)"}
{"zero-mul-random", "0", "($r * 0)"}
{"zero-mod-one", "0", "($r % 1)"}
{"zero-xor-random", "0", "($r ^ $r)"}
{"zero-and-random", "0", "(0 & $r)"}
{"zero-neq-random", "0", "($r != $r)"}
{"zero-lt-random", "0", "($r < $r)"}
{"zero-gt-random", "0", "($r > $r)"}
{"zero-land-random", "0", "($r:bool && 0)"}
{"zero-not-one", "0", "(! 1)"}
{"zero-neg", "0", "(- 0)"}
{"double-lxor-bool", "0", "($r:bool ^^ $r:bool)"}

# commutativity
{"comm-add", "(?a + ?b)", "(?b + ?a)"}
{"comm-mul", "(?a * ?b)", "(?b * ?a)"}
{"comm-and", "(?a & ?b)", "(?b & ?a)"}
{"comm-or", "(?a | ?b)", "(?b | ?a)"}
{"comm-xor", "(?a ^ ?b)", "(?b ^ ?a)"}
{"comm-land", "(?a && ?b)", "(?b && ?a)"}
{"comm-lor", "(?a || ?b)", "(?b || ?a)"}
{"comm-lxor", "(?a ^^ ?b)", "(?b ^^ ?a)"}
{"comm-eq", "(?a == ?b)", "(?b == ?a)"}
{"comm-neq", "(?a != ?b)", "(?b != ?a)"}
{"flip-lt", "(?a < ?b)", "(?b > ?a)"}
{"flip-le", "(?a <= ?b)", "(?b >= ?a)"}
{"flip-gt", "(?a > ?b)", "(?b < ?a)"}
{"flip-ge", "(?a >= ?b)", "(?b <= ?a)"}

# associativity
{"assoc-add", "((?a + ?b) + ?c)", "(?a + (?b + ?c))"}
{"assoc-add-rev", "(?a + (?b + ?c))", "((?a + ?b) + ?c)"}
{"assoc-mul", "((?a * ?b) * ?c)", "(?a * (?b * ?c))"}
{"assoc-mul-rev", "(?a * (?b * ?c))", "((?a * ?b) * ?c)"}
{"assoc-and", "((?a & ?b) & ?c)", "(?a & (?b & ?c))"}
{"assoc-and-rev", "(?a & (?b & ?c))", "((?a & ?b) & ?c)"}
{"assoc-land", "((?a && ?b) && ?c)", "(?a && (?b && ?c))"}
{"assoc-land-rev", "(?a && (?b && ?c))", "((?a && ?b) && ?c)"}
{"assoc-lor", "((?a || ?b) || ?c)", "(?a || (?b || ?c))"}
{"assoc-lor-rev", "(?a || (?b || ?c))", "((?a || ?b) || ?c)"}
{"assoc-lxor", "((?a ^^ ?b) ^^ ?c)", "(?a ^^ (?b ^^ ?c))"}
{"assoc-lxor-rev", "(?a ^^ (?b ^^ ?c))", "((?a ^^ ?b) ^^ ?c)"}
{"assoc-sub-add", "((?a - ?b) + ?c)", "(?a - (?b - ?c))"}

# distributivity
{"dist-mul-add", "(?a * (?b + ?c))", "((?a * ?b) + (?a * ?c))"}
{"factor-mul-add", "((?a * ?b) + (?a * ?c))", "(?a * (?b + ?c))"}
{"dist-mul-sub", "(?a * (?b - ?c))", "((?a * ?b) - (?a * ?c))"}
{"dist-neg-add", "(- (?a + ?b))", "((- ?a) - ?b)"}
{"dist-land-lor", "(?a && (?b || ?c))", "((?a && ?b) || (?a && ?c))"}
{"dist-lor-land", "(?a || (?b && ?c))", "((?a || ?b) && (?a || ?c))"}

# De Morgan
{"demorgan-land", "(! (?a && ?b))", "((! ?a) || (! ?b))"}
{"demorgan-lor", "(! (?a || ?b))", "((! ?a) && (! ?b))"}
{"demorgan-land-rev", "((! ?a) || (! ?b))", "(! (?a && ?b))"}
{"demorgan-lor-rev", "((! ?a) && (! ?b))", "(! (?a || ?b))"}

# Boolean identities
{"double-lor-bool", "?a:bool", "(?a || ?a)"}
{"double-land-bool", "?a:bool", "(?a && ?a)"}
{"double-not-bool", "?a:bool", "(! (! ?a))"}
{"land-one-bool", "?a:bool", "(?a && 1)"}
{"lor-zero-bool", "?a:bool", "(?a || 0)"}
{"lxor-zero-bool", "?a:bool", "(?a ^^ 0)"}
{"eq-one-bool", "?a:bool", "(?a == 1)"}
{"neq-zero-bool", "?a:bool", "(?a != 0)"}
{"cond-bool", "?a:bool", "(?a ? 1 : 0)"}
{"lxor-to-neq", "(?a ^^ ?b)", "(?a != ?b)"}
{"not-to-lxor", "(! ?a)", "(?a ^^ 1)"}
{"land-to-mul-eq", "(?a && ?b)", "((?a * ?b) == 1)"}
{"land-to-mul", "(?a && ?b)", "(?a * ?b)"}
{"lor-to-arith", "(?a || ?b)", "((?a + ?b) - (?a * ?b))"}
{"lxor-to-arith", "(?a ^^ ?b)", "((?a + ?b) - (2 * (?a * ?b)))"}
{"not-to-sub", "(! ?a)", "(1 - ?a)"}

# comparisons
{"neq-to-not-eq", "(?a != ?b)", "(! (?a == ?b))"}
{"eq-to-not-neq", "(?a == ?b)", "(! (?a != ?b))"}
{"eq-to-sub-zero", "(?a == ?b)", "((?a - ?b) == 0)"}
{"le-to-not-gt", "(?a <= ?b)", "(! (?a > ?b))"}
{"lt-to-not-ge", "(?a < ?b)", "(! (?a >= ?b))"}
{"ge-to-not-lt", "(?a >= ?b)", "(! (?a < ?b))"}
{"gt-to-not-le", "(?a > ?b)", "(! (?a <= ?b))"}
{"le-to-lt-or-eq", "(?a <= ?b)", "((?a < ?b) || (?a == ?b))"}

# arithmetic
{"sub-to-add-neg", "(?a - ?b)", "(?a + (- ?b))"}
{"neg-to-sub", "(- ?a)", "(0 - ?a)"}
{"neg-to-mul", "(- ?a)", "(?a * (0 - 1))"}
{"pow2-to-mul", "(?a ** 2)", "(?a * ?a)"}
{"mul-to-pow2", "(?a * ?a)", "(?a ** 2)"}
{"mul2-to-add", "(?a * 2)", "(?a + ?a)"}
{"add-self-to-mul", "(?a + ?a)", "(?a * 2)"}
{"div-to-mul-inv", "(?a / ?b)", "(?a * (1 / ?b))"}

# conditionals
{"cond-swap", "(?c ? ?a : ?b)", "((! ?c) ? ?b : ?a)"}
{"cond-to-arith", "(?c ? ?a : ?b)", "((?c * ?a) + ((1 - ?c) * ?b))"}
{"cond-lift-add", "(?c ? (?a + ?b) : (?a + ?d))", "(?a + (?c ? ?b : ?d))"}
"""
