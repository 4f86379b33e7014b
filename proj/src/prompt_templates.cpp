// Prompt bodies for the augmentation experiments, kept byte-for-byte.
// tests/golden/*.txt hold the same text and a test compares them.

#include "sciret/augment.hpp"

namespace sciret::detail {

extern const std::string_view kRewriteTemplate = R"tpl(Translate informal text into precise academic language, preserving
original meaning.

Transformation Guidelines:
- Correct the original tweet's spelling and grammar errors while maintaining its style
- Convert colloquial language to precise academic terminology
- Convert hastags into proper words
- Do not add anything new. Only correct the mistakes in the original tweet.

Output format:
Return a single string

Example:
Original Tweet: "Just saw amazin new study - mice w/ #Alzheimers showed
45
#neurodegeneration research imo"

Output:
Just saw amazing new study - mice with Alzheimers showed 45
in memory after new drug treatment!! Game changer for
neurodegeneration research in my opinion

Transform the following tweet:
{tweet})tpl";

extern const std::string_view kExpandTemplate = R"tpl(Translate informal text into precise academic language, according to the
transformation guidelines.

Transformation Guidelines:

First, correct the original tweet's spelling and grammar errors while
maintaining its style. Then transform the tweet into academic language
using these rules:

-Convert colloquial language to precise academic terminology
-Maintain semantic accuracy of the original message
-Use passive voice and objective scientific tone
-Eliminate informal expressions and subjective qualifiers
-Transform hashtags into their full, proper form (e.g., "#COVID19" -> "COVID-19 pandemic")
-Expand abbreviations and acronyms to their full forms
-Include key research terms that would appear in academic database searches
-Preserve all factual claims, statistics, and findings mentioned
-Structure as a concise academic abstract (2-3 sentences)

Output format:
Return a single continuous string with both versions separated by " || " as follows:
[Corrected Tweet] || [Academic Version]

Example:
Original Tweet: "Just saw amazin new study - mice w/ #Alzheimers showed
45
#neurodegeneration research imo"

Output:
"Just saw amazing new study - mice with #Alzheimers showed 45%
improvement in memory after new drug treatment!! Game changer for
#neurodegeneration research in my opinion || A recent pharmacological
intervention demonstrated significant efficacy in an Alzheimer's
disease mouse model, with subjects exhibiting a 45
memory function following administration of the novel compound.
These findings represent a potentially significant advancement in
neurodegenerative disease research, particularly regarding
therapeutic approaches for memory deficit amelioration in Alzheimer's
pathology."

Transform the following tweet:
{tweet})tpl";

extern const std::string_view kHydeTemplate = R"tpl(You are an expert in scientific research. Based on the following tweet,
generate a hypothetical scientific paper that includes only a title and
an abstract. The abstract should succinctly summarize the research
objective, methodology,  key findings, and conclusions.

Tweet: {tweet}

{format_instructions})tpl";

extern const std::string_view kDocSummaryTemplate = R"tpl(Summarize the following document:

Title: {title}
Abstract: {page_content}

Make sure to include keywords that are likely to be found later by a
search.

{format_instructions})tpl";

extern const std::string_view kDocTweetTemplate = R"tpl(Generate a hypothetical Twitter tweet about the following document:

Title: {title}
Abstract: {page_content}

Make sure it looks like a typical tweet from an average person and is
not too long.

{format_instructions})tpl";

}  // namespace sciret::detail
