# Copyright 2026 The Spectral3 Authors
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.

import ply.lex as lex

from spectral3.errors import SearchSyntaxError

operators = {
    'suite': 'OP_SUITE',
    'check': 'OP_CHECK',
    'run': 'OP_RUN',
    'status': 'OP_STATUS',
    'since': 'OP_SINCE',
    'until': 'OP_UNTIL',
    'rel_err': 'OP_REL_ERR',
    'abs_err': 'OP_ABS_ERR',
    'runtime': 'OP_RUNTIME',
    }

reserved = {
    'and': 'AND',
    'or': 'OR',
    'not': 'NOT',
    }

tokens = [
    'OP',
    'AND',
    'OR',
    'NOT',
    'NEG',
    'LPAREN',
    'RPAREN',
    'NUMBER',
    'NUMCOMP',
    'SSTRING',
    'DSTRING',
    'USTRING',
    'DATE',
    ] + list(operators.values())

def SearchTokenizer():
    t_LPAREN = r'\('   # NOQA
    t_RPAREN = r'\)'   # NOQA
    t_ignore = ' \t'   # NOQA (and intentionally not using r'' due to tab char)

    def t_OP(t):
        r'[a-zA-Z_][a-zA-Z_-]*:'
        t.type = operators.get(t.value[:-1], 'OP')
        return t

    def t_SSTRING(t):
        r"'([^\\']+|\\'|\\\\)*'"
        t.value = t.value[1:-1].replace("\\'", "'").replace('\\\\', '\\')
        return t

    def t_DSTRING(t):
        r'"([^\\"]+|\\"|\\\\)*"'
        t.value = t.value[1:-1].replace('\\"', '"').replace('\\\\', '\\')
        return t

    def t_DATE(t):
        r'\d{4}-\d\d-\d\d(T\d\d:\d\d(:\d\d)?)?'
        return t

    def t_NUMCOMP(t):
        r'[<>]=?[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?'
        op = t.value[:2] if t.value[1] == '=' else t.value[:1]
        t.value = (op, float(t.value[len(op):]))
        return t

    def t_NUMBER(t):
        r'[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?(?![^\s\(\)])'
        t.value = float(t.value)
        return t

    def t_NEG(t):
        r'[-!](?=[\s\(a-zA-Z_])'
        return t

    def t_USTRING(t):
        r'[^\s\(\)!-][^\s\(\)]*'
        t.type = reserved.get(t.value.lower(), 'USTRING')
        return t

    def t_newline(t):
        r'\n+'
        t.lexer.lineno += len(t.value)

    def t_error(t):
        raise SearchSyntaxError("Illegal character '%s' in search string \"%s\" (col %s)" % (
            t.value[0], t.lexer.lexdata, t.lexpos))

    return lex.lex()
