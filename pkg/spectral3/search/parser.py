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

import dateutil.parser
import ply.yacc as yacc
from sqlalchemy.sql.expression import and_, or_, not_, func

import spectral3.db
from spectral3.errors import SearchSyntaxError
from spectral3.search.tokenizer import tokens  # NOQA

NUMERIC_COLUMNS = {
    'rel_err:': 'rel_err',
    'abs_err:': 'abs_err',
    'runtime:': 'runtime',
    }


def glob_to_like(pattern):
    """check:voronoi* style globs as SQL LIKE patterns."""
    escaped = pattern.replace('\\', '\\\\').replace('%', '\\%').replace('_', '\\_')
    return escaped.replace('*', '%').replace('?', '_')


def text_match(column, pattern):
    if pattern.startswith('^'):
        return func.matches(pattern, column)
    if '*' in pattern or '?' in pattern:
        return column.like(glob_to_like(pattern), escape='\\')
    return column == pattern


def compare(column, op, value):
    if op == '<':
        return column < value
    if op == '<=':
        return column <= value
    if op == '>':
        return column > value
    if op == '>=':
        return column >= value
    return column == value


def parse_date(value):
    try:
        return dateutil.parser.isoparse(value)
    except ValueError:
        raise SearchSyntaxError('Syntax error: bad date %s' % (value,))


def SearchParser():
    precedence = (  # NOQA
        ('left', 'OR'),
        ('left', 'AND'),
        ('left', 'NOT', 'NEG'),
    )

    def p_terms(p):
        '''expression : list_expr
                      | paren_expr
                      | boolean_expr
                      | negative_expr
                      | term'''
        p[0] = p[1]

    def p_list_expr(p):
        '''list_expr : expression expression'''
        p[0] = and_(p[1], p[2])

    def p_paren_expr(p):
        '''paren_expr : LPAREN expression RPAREN'''
        p[0] = p[2]

    def p_boolean_expr(p):
        '''boolean_expr : expression AND expression
                        | expression OR expression'''
        if p[2].lower() == 'and':
            p[0] = and_(p[1], p[3])
        elif p[2].lower() == 'or':
            p[0] = or_(p[1], p[3])
        else:
            raise SearchSyntaxError("Boolean %s not recognized" % p[2])

    def p_negative_expr(p):
        '''negative_expr : NOT expression
                         | NEG expression'''
        p[0] = not_(p[2])

    def p_term(p):
        '''term : suite_term
                | check_term
                | run_term
                | status_term
                | since_term
                | until_term
                | numeric_term
                | op_term'''
        p[0] = p[1]

    def p_string(p):
        '''string : SSTRING
                  | DSTRING
                  | USTRING'''
        p[0] = p[1]

    def p_suite_term(p):
        '''suite_term : OP_SUITE string'''
        p[0] = text_match(spectral3.db.check_result_table.c.suite, p[2])

    def p_check_term(p):
        '''check_term : OP_CHECK string'''
        p[0] = text_match(spectral3.db.check_result_table.c.check, p[2])

    def p_run_term(p):
        '''run_term : OP_RUN string'''
        p[0] = text_match(spectral3.db.run_table.c.name, p[2])

    def p_status_term(p):
        '''status_term : OP_STATUS string'''
        table = spectral3.db.check_result_table
        if p[2] in ('pass', 'passed'):
            p[0] = table.c.passed == True  # NOQA
        elif p[2] in ('fail', 'failed'):
            p[0] = table.c.passed == False  # NOQA
        elif p[2] == 'error':
            p[0] = table.c.error.isnot(None)
        else:
            raise SearchSyntaxError('Syntax error: status:%s is not supported' % p[2])

    def p_since_term(p):
        '''since_term : OP_SINCE DATE'''
        p[0] = spectral3.db.run_table.c.created >= parse_date(p[2])

    def p_until_term(p):
        '''until_term : OP_UNTIL DATE'''
        p[0] = spectral3.db.run_table.c.created < parse_date(p[2])

    def p_numeric_term(p):
        '''numeric_term : OP_REL_ERR NUMCOMP
                        | OP_ABS_ERR NUMCOMP
                        | OP_RUNTIME NUMCOMP
                        | OP_REL_ERR NUMBER
                        | OP_ABS_ERR NUMBER
                        | OP_RUNTIME NUMBER'''
        column = getattr(spectral3.db.check_result_table.c, NUMERIC_COLUMNS[p[1]])
        if isinstance(p[2], tuple):
            p[0] = compare(column, *p[2])
        else:
            p[0] = column == p[2]

    def p_op_term(p):
        'op_term : OP'
        raise SearchSyntaxError('Syntax error: unknown operator %s' % (p[1],))

    def p_error(p):
        if p:
            raise SearchSyntaxError('Syntax error at "%s" in search string "%s" (col %s)' % (
                p.lexer.lexdata[p.lexpos:], p.lexer.lexdata, p.lexpos))
        else:
            raise SearchSyntaxError('Syntax error: EOF in search string')

    return yacc.yacc(debug=0, write_tables=0)
