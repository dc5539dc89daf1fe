"""Prompt templates with named placeholders.

Placeholders use ``{name}`` tokens. Rendering substitutes only declared
placeholders, so literal JSON braces in template bodies pass through untouched.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import UsageError

_PLACEHOLDER_RE = re.compile(r"\{([a-z][a-z0-9_]*)\}")


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    body: str
    required: tuple[str, ...]

    def render(self, bindings: dict[str, str]) -> str:
        missing = [name for name in self.required if name not in bindings]
        if missing:
            raise UsageError(
                f"template '{self.template_id}' missing bindings: {', '.join(missing)}"
            )

        def sub(match: re.Match[str]) -> str:
            name = match.group(1)
            if name in bindings:
                return str(bindings[name])
            return match.group(0)

        rendered = _PLACEHOLDER_RE.sub(sub, self.body)
        residual = [
            name
            for name in _PLACEHOLDER_RE.findall(rendered)
            if name in self.required
        ]
        if residual:
            raise UsageError(
                f"template '{self.template_id}' left placeholders unresolved: {residual}"
            )
        return rendered


SCHEMA_DESIGN = PromptTemplate(
    template_id="schema_design",
    required=("question",),
    body="""Given the following question, design a structured data format to represent the answer:
Question: {question}.

Your task:
1. Carefully analyze the question to identify ONLY the specific information explicitly requested.
2. Design a table structure with columns that directly correspond to the requested information.
3. Provide the structure in a "record" format: [{"column_1": "value_description", "column_2": "value_description"}]
4. Ensure all dictionary objects in the list share the same set of columns.
5. Use clear and descriptive names for the columns.
6. Avoid nested structures or hierarchical data - keep everything flat.

Guidelines:
- Choose column names that are self-explanatory and follow a consistent naming convention.
- Create columns ONLY for information directly mentioned or clearly implied in the question.
- Do NOT add columns for information that might be related but is not specifically asked for.
- Describe the expected values for each column (e.g., data type, format, range, units).
- For columns with multiple possible values:
    * Create boolean columns for each option (e.g., "has_feature_X", "has_feature_Y").
    * Or use a numeric scale to indicate presence/absence or degree (e.g., 0-5 scale).
- For columns with a limited set of possible values, list all possible options.
- For numerical values (e.g., size, length, weight), specify the unit of measurement if relevant.
- For date/time values, specify the expected format.
Formulate your response as a JSON object containing the designed structure.

Ensure your structure capture all relevant information from the question, while also being flexible enough to accommodate various possible answers.
""",
)


META_EXTRACTION = PromptTemplate(
    template_id="meta_extraction",
    required=("paper", "format_instructions"),
    body="""You should extract the meta information of the given paper.
This is the paper content: {paper}.

Besides, the information you need to extract includes the following keys: "Title", "Abstract", "Year", "Author", "Journal/Conference", "ISSN", "Volume", "Issue", "Page", "DOI", "Link", "Publisher", "Language".
For the page, please use the format like "12-15", "134-145". If there is only one page, the format can be "145", "1345".
When there is no such information about a key, you just return the "none" as the value of the key, but you should make sure there is no such information. You should try your best to retrieve the information and reduce the occurrence of "none".

{format_instructions}
""",
)


TABLE_IDENTIFICATION = PromptTemplate(
    template_id="table_identification",
    required=("page_content",),
    body="""I will give you a page of a pdf file.
You need first to judge whether there is any table in the page content.
Then you need to extract the original information of the table from the page content.
The following is the page content: {page_content}

If yes, just tell me the answer through the JSON format which includes the following keys: table_name and table_content.

Store all the JSON in a list through "[ ]". Besides, table_name is the Table order, such as Table 1, Table 2, and Table 3.

Note that you should tell me the related region of this table (raw data) from the page content without any processing in the table_content.
Besides, you shouldn't output any other things (such as 'yes' or many explanations). That means, you just need to tell me the final output in JSON format in your response.

If not, just tell me "no".
""",
)


TABLE_STRUCTURING = PromptTemplate(
    template_id="table_structuring",
    required=("table_information",),
    body="""I will give you a table content. You need to organize it in a CSV format. This is the step:
(1) You should determine the column names.
(2) You should fill in all the data in the corresponding column and row.

There are some points you should pay attention to:
(1) Don't leave out any of the information I gave you, you should organize all my information into a table for me.
(2) Be careful to "\\n". If \\n exists, there are two kinds of scenarios. First of all, it may be too long resulting in a branch, this time the front and back are actually one and the same. If you find that \\n before and after can not form a whole, that is a nested table. the front column name is the parent column name of the back column name. At this time, you should add a parent column name. You should pay special attention when composing column names. You can use line breaks to notice which names are in a column. Here are a few different examples:
(a) example1: For the column name message "Tempo de estocagem (dias)\\n 0 55 90 145 180 235 280 360", you should pay special attention to the fact that there is an \\n after Tempo de estocagem (dias), so this could mean that The column names 0 55 90 145 180 235 280 360 are sub-columns of Tempo de estocagem (dias). At this point you need to organize into:
Tempo de estocagem (dias), Tempo de estocagem (dias), Tempo de estocagem (dias), Tempo de estocagem (dias), Tempo de estocagem (dias), Tempo de estocagem (dias), Tempo de estocagem (dias), Tempo de estocagem (dias)
0, 55, 90, 145, 180, 235, 280, 360.
There are the column names at the previous level and column names at the next level, respectively.
There are more examples of this:
input: All-trans-b-caroteneb(mg/g DM) 13-cis-b-carotene Retention of\\nall-trans -b-carotene (%)d\\n(mg/g DM)c(% of total b-carotene):
thoughts: Retention of \\nall-trans -b-carotene (%) can be thought of as turning a row instead of two columns. \\n(mg/g DM)c (% of total b-carotene) is a sub-column, and since it can be seen that 13-cis-b-carotene has no units, (mg/g DM)c and (% of total b-carotene) should be sub-columns of 13-cis-b-carotene. So the final column name should be organized as:
output: All-trans-b-caroteneb (mg/g DM), 13-cis-b-carotene (mg/g DM)c, 13-cis-b-carotene (% of total b-carotene), Retention of all-trans-b-carotene (%)d
(b) example2: Sometimes the row breaks don't necessarily represent a relationship between the column name and the subcolumn name, such as the following: TPO2 a 23 °C, 1 atm(1) \\n (mL (CNTP).m-2.dia-1). It may just be that the data is too long to be a unit. This time TPO2 a 23 °C, 1 atm(1) (mL (CNTP).m-2.dia-1) is one unit.
(3) Note some of the special symbols such as ±.
(4) You need to ignore some special symbols, such as Unicode code point representations (e.g., /uni0394, /uni00A0).
(5) You should use "" to wrap every cell.
(6) Sometimes there will be redundant spaces, and you need to deal with those depending on the context. For example, there may be many spaces in "16  ± 0.6" due to noise, but they actually represent "16±0.6".

This is the content of my table: {table_information}

Tell me the answer in JSON format, including keys "table_caption" and "table_content", while "table_content" should be in string of CSV format.
""",
)


FIGURE_DESCRIPTION = PromptTemplate(
    template_id="figure_description",
    required=("caption",),
    body=(
        "I will give you a figure in the paper. Besides, I will also give you the "
        "caption of this figure. You should describe the data insight in this figure "
        "based on the caption. The more detailed the description, the better. "
        "This is the caption: {caption}."
    ),
)


CHUNK_SUMMARY = PromptTemplate(
    template_id="chunk_summary",
    required=("kind", "guidance", "content"),
    body="""Summarize the following {kind} content from a scientific paper in at most 600 characters.
The summary indexes the content for retrieval, so keep the terms that someone searching for this content would use. {guidance}

Content:
{content}

Reply with the summary text only.
""",
)


RECORD_EXTRACTION = PromptTemplate(
    template_id="record_extraction",
    required=("question", "columns_json", "schema_json", "contexts"),
    body="""You are extracting structured data records from excerpts of one scientific paper.
Answer the question solely based on the provided contexts. Do not use outside knowledge.
Output "Empty" for any value that cannot be determined from the given contexts.
A paper may support several records (for example several models, crops, or conditions); emit one record per distinct entity rather than collapsing them into one.

Question: {question}

Columns (exact keys): {columns_json}
Column value descriptions: {schema_json}

Contexts:
{contexts}

Reply with a JSON object with two keys:
  "records": a list of records, each a flat JSON object with exactly the column keys above,
  "summary": one or two sentences summarizing what this paper contributes to the answer.
""",
)


ANSWER_SUMMARY = PromptTemplate(
    template_id="answer_summary",
    required=("question", "stats", "fragments"),
    body="""Write a short summary (at most 1200 characters) of a data table extracted from a collection of papers.
Mention how many documents are covered, and call out notable gaps (documents with no extractable data, columns that are mostly empty).

Question: {question}
Table statistics: {stats}
Per-document notes:
{fragments}

Reply with the summary text only.
""",
)


QUESTION_RECONSTRUCTION = PromptTemplate(
    template_id="question_reconstruction",
    required=("answer", "count"),
    body="""Given the following answer, write {count} distinct questions that this answer would directly address.

Answer: {answer}

Reply with a JSON object: {"questions": ["...", "..."]}
""",
)


SENTENCE_RELEVANCE = PromptTemplate(
    template_id="sentence_relevance",
    required=("question", "count", "sentences"),
    body="""Below are {count} numbered sentences retrieved as context for a question.
Decide for each sentence whether it is relevant to answering the question.

Question: {question}

Sentences ({count}):
{sentences}

Reply with a JSON object: {"relevant_indices": [0, 2, ...]} listing the numbers of the relevant sentences.
""",
)


CLAIM_DECOMPOSITION = PromptTemplate(
    template_id="claim_decomposition",
    required=("answer",),
    body="""Decompose the following answer into its individual factual claims.
Each claim must be a single self-contained statement.

Answer: {answer}

Reply with a JSON object: {"claims": ["...", "..."]}
""",
)


CLAIM_SUPPORT = PromptTemplate(
    template_id="claim_support",
    required=("count", "claims", "contexts"),
    body="""Below are {count} numbered claims and a set of context passages.
Decide for each claim whether it is supported by the contexts.

Claims ({count}):
{claims}

Contexts:
{contexts}

Reply with a JSON object: {"supported": [true, false, ...]} with one boolean per claim, in order.
""",
)


CLUSTER_LABEL = PromptTemplate(
    template_id="cluster_label",
    required=("members",),
    body="""The following values were grouped together because they appear to describe the same thing.
Write one short label (at most 6 words) that names the group.

Values with their counts:
{members}

Reply with the label only.
""",
)


TEMPLATES: dict[str, PromptTemplate] = {
    t.template_id: t
    for t in (
        SCHEMA_DESIGN,
        META_EXTRACTION,
        TABLE_IDENTIFICATION,
        TABLE_STRUCTURING,
        FIGURE_DESCRIPTION,
        CHUNK_SUMMARY,
        RECORD_EXTRACTION,
        ANSWER_SUMMARY,
        QUESTION_RECONSTRUCTION,
        SENTENCE_RELEVANCE,
        CLAIM_DECOMPOSITION,
        CLAIM_SUPPORT,
        CLUSTER_LABEL,
    )
}


def get_template(template_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise UsageError(f"unknown template '{template_id}'") from None
