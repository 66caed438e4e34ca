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

"""The run-index query language: suite:hecke and status:fail and rel_err:>1e-6."""

import sqlalchemy.sql.selectable
from sqlalchemy.sql.expression import and_

from spectral3.errors import SearchSyntaxError
from spectral3.search import tokenizer, parser
import spectral3.db


class SearchCompiler(object):
    def __init__(self):
        self.lexer = tokenizer.SearchTokenizer()
        self.parser = parser.SearchParser()

    def findTables(self, expression):
        tables = set()
        stack = [expression]
        while stack:
            x = stack.pop()
            if hasattr(x, 'table'):
                if (x.table != spectral3.db.check_result_table
                    and hasattr(x.table, 'name')):
                    tables.add(x.table)
            for child in x.get_children():
                if not isinstance(child, sqlalchemy.sql.selectable.Select):
                    stack.append(child)
        return tables

    def parse(self, data):
        result = self.parser.parse(data, lexer=self.lexer)
        tables = self.findTables(result)
        if spectral3.db.run_table in tables:
            result = and_(spectral3.db.check_result_table.c.run_key == spectral3.db.run_table.c.key,
                          result)
            tables.remove(spectral3.db.run_table)
        if tables:
            raise SearchSyntaxError("Unknown table in search: %s" % tables)
        return result
