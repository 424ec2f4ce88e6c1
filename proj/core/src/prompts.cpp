// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Prompt layouts for detection, rationalization, reasoning judging, rubric
// generation and rubric judging.

#include <initializer_list>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "vdpost/corpus.hpp"
#include "vdpost/judge.hpp"

namespace vdpost {

namespace {

constexpr std::string_view kDetectorSystem =
    "You are a vulnerability detection expert specializing in identifying security flaws in C/C++ code, with a "
    "focus on Common Weakness Enumeration (CWE) standards. You provide precise, evidence-based analysis without "
    "speculation, and clearly label any vulnerabilities you detect.";

constexpr std::string_view kEvaluatorSystem =
    "You are to act as a meticulous and impartial Code Security Expert and Evaluator.";

constexpr std::string_view kDetectorUser = R"P(Your task is to evaluate whether the following C/C++ code contains any security vulnerabilities.

You will be provided with two sections:
1. Context: Relevant code such as includes, type definitions, global variables, macros, and definitions of any functions called within the target function.
2. Code: The target function to analyze.

Use all available information to analyze the function step by step.
If the target function alone is insufficient to determine whether a vulnerability exists, refer to the Context section before making a judgment.
Do not assume vulnerabilities — only report what is supported by the code and context.

In your final response, list all detected vulnerabilities and CWE identifiers if applicable.
Conclude with one of the following indicators on a new line:
- HAS_VUL — if any vulnerabilities are found
- NO_VUL — if no vulnerabilities are found

{SECTIONS}Analyze the code now.)P";

constexpr std::string_view kRationalizationUser = R"P(1. Task
Your task is to generate a Vulnerability Reasoning Trace for a specific code snippet. This reasoning trace will be used to train a student model to detect vulnerabilities.

Crucially, you must simulate a "Blind Audit". You are provided with Ground Truth information (Code status, CWE ID, CVE description, commit message, patch diff) to ensure your analysis is factually correct, but your output must appear as if you derived the conclusion solely through deductive code analysis.

2. Input Data
{INPUT}
```Hidden Ground Truth CONFIDENTIAL - FOR TEACHER CONTEXT ONLY The following information is the "Answer Key". Use it to verify which lines are vulnerable and why, but NEVER reference these documents, IDs, or the existence of a patch in your final output.

- Code Status: {CODE_STATUS}
- CWE ID: {CWE_ID}
- CVE Description: {CVE_DESCRIPTION}
- Commit Message: {COMMIT_MESSAGE}
- Patch Diff: {CODE_DIFF}
```

3. Analysis Instructions
Step 1: Analyze the Target Code: Examine the Code and its Context.
Step 2: Check Code Status: Look at the Code Status provided above.
- If PRE-PATCH: Your reasoning must explain how the code enables the specific vulnerability described in the Ground Truth.
- If POST-PATCH: Your reasoning must explain why the code is safe, specifically highlighting the presence of the validation or logic that prevents the vulnerability described in the Ground Truth.
Step 3: Consult Ground Truth (Silently): Read the Hidden Ground Truth to understand the vulnerability mechanics. Use this strictly as a fact-checking reference.
Step 4: Simulate Discovery: Construct a step-by-step logical argument that leads to that finding using only the visible code tokens.
- Do not say: "The patch fixes this by..."
- Do say: "The variable len is validated against MAX_SIZE before use, preventing overflow..." (if Fixed) or "The variable len is used without validation..." (if Vulnerable).
Step 5: Determine Verdict:
- If `Code Status` is "PRE-PATCH": Verdict is HAS_VUL.
- If `Code Status` is "POST-PATCH": Verdict is NO_VUL.

4. Negative Constraints (Strict Adherence Required)
- NO mentions of Hidden Ground Truth, such as "CVE", "Commit", "Patch", "Diff", "Fix", or "Description".
- NO references to "The provided info" or "Ground truth".
- NO phrasing like "As seen in the diff" or "This was later patched".
- NO external knowledge hallucination (e.g., do not invent a specific exploit date or hacker group). Stick to the code logic.

5. Output Format
In your final response, list all detected vulnerabilities and CWE identifiers if applicable.
Conclude with one of the following verdicts on a new line:
- HAS_VUL — if any vulnerabilities are found
- NO_VUL — if no vulnerabilities are found)P";

constexpr std::string_view kJudgeVulnerableUser = R"P(1. Goal
Your primary goal is to assess the quality of an analysis of a vulnerable piece of code. You must evaluate the analysis against a provided set of ground truth information. Your judgment must be objective, strictly adhering to the provided option rubric and based only on the information given.

2. Input Format
You will be provided with a JSON object containing two main keys: analysis and ground_truth_info
```json
{
  "analysis": "<The full analysis, including its reasoning and answer.>",
  "ground_truth_info": {
    "is_vulnerable": true,
    "cve_description": "<The official CVE description of the vulnerability.>",
    "patch_commit_message": "<The developer's commit message that may explain the vulnerability.>",
    "patch_commit_diff": "<A git-style diff showing the changes from the pre-patched (vulnerable) to the post-patched (non-vulnerable) code.>"
  }
}
```

Analysis Context & Critical Warning:
The analysis you are evaluating is generated based on the pre-patched (vulnerable) code. The patch_commit_diff and patch_commit_message is provided only as a reference to help you understand the precise location and nature of the ground truth vulnerability. Do not let it mislead you into thinking the vulnerability has already been fixed in the pre-patched code that is analyzed.

3. Evaluation Workflow and Option Rubric
You must follow these steps to evaluate the analysis and produce a final JSON output. For each dimension, you need to provide a brief justification and choose an option.
Step 1: Analyze Ground Truth
First, carefully review all the information in the ground_truth_info. This is your foundation for judgment.
Step 2: Evaluate Each Dimension

Assess the analysis across the following dimension. Choose an option for each based on the rubric below.
Dimension 1: Correctness
Task: Evaluate if the analysis correctly identifies the target CVE mentioned in the ground_truth_info.
Option Rubric:
* CORRECT: The analysis identifies the code as vulnerable, AND the explanation of the root cause of the predicted vulnerability also aligns with the ground truth vulnerability information provided in the ground_truth_info. Besides, it is acceptable if the analysis also identifies other vulnerabilities.
* PARTIALLY INCORRECT: The analysis identifies the code as vulnerable, BUT the explanation of the root cause of the predicted vulnerability does not align with the ground truth vulnerability information provided in the ground_truth_info.
* INCORRECT: The analysis identifies the code as non-vulnerable.

4. Output Format
Your final output must be a single JSON object. Do not include any text or explanation outside of the JSON structure. The JSON must contain a key for each dimension's justification and option.
```json
{
  "correctness": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "PARTIALLY INCORRECT", "INCORRECT"]>
  }
}
```

Current Input
```json
{INPUT}
```)P";

constexpr std::string_view kJudgePatchedUser = R"P(1. Goal
Your primary goal is to assess the quality of an analysis of post-patched code in which the target CVE has been fixed. You must evaluate the analysis against a provided set of ground truth information. Your judgment must be objective, strictly adhering to the provided option rubric and based only on the information given.

2. Input Format
You will be provided with a JSON object containing two main keys: analysis and ground_truth_info
```json
{
  "analysis": "<The full analysis, including its reasoning and answer.>",
  "ground_truth_info": {
    "target_CVE_in_code": false,
    "cve_description": "<The official CVE description of the vulnerability that was fixed.>",
    "patch_commit_message": "<The developer's commit message that may explain the fix.>",
    "patch_commit_diff": "<A git-style diff showing the changes that fixed the vulnerability.>"
  }
}
```

Analysis Context & Critical Warning:
The analysis you are evaluating is generated based on the post-patched code in which the target CVE has been fixed. The ground_truth_info is provided only as a reference to help you understand how the target CVE is fixed. Do not let it mislead you into thinking the target CVE is still present in the post-patched code that is analyzed. Please note that "target_CVE_in_code": false in the ground_truth_info can only indicate that the target CVE does not exist in the code, but it cannot guarantee whether the code contains other unknown vulnerabilities.

3. Evaluation Workflow and Option Rubric
You must follow these steps to evaluate the analysis and produce a final JSON output. For each dimension, you need to provide a brief justification and choose an option.
Step 1: Analyze Ground Truth
First, carefully review all the information in the ground_truth_info. This is your foundation for judgment.
Step 2: Evaluate Each Dimension

Assess the analysis across the following four dimensions. Choose an option for each based on the rubric below.
Dimension 1: Correctness
Task: Evaluate whether the analysis identifies that a vulnerability with the exactly same root cause in ground_truth_info still exists in the post-patched code.
Option Rubric:
- CORRECT: The analysis finds no vulnerabilities in the code.
- UNKNOWN: The analysis does not identify a vulnerability with the exactly same root cause as in ground_truth_info, but it does identify other unknown vulnerabilities with different root causes.
- INCORRECT: Select this option ONLY IF the analysis identifies that a vulnerability with the exactly same root cause as in ground_truth_info still exists in the code.
Please select UNKNOWN if the analysis identifies vulnerabilities whose root causes are not exactly the same as the vulnerability in ground_truth_info, even if they are only similar. For example, the analysis identifies that the code contains an out-of-bound access vulnerability, and the target CVE in ground_truth_info is also an out-of-bound access vulnerability. However, the root causes of the two vulnerabilities are not exactly same (e.g., they occur in different locations). In this situation, you should choose UNKNOWN, because the two vulnerabilities are not exactly the same.

4. Output Format
Your final output must be a single JSON object. Do not include any text or explanation outside of the JSON structure. The JSON must contain a key for each dimension's justification and option.
```json
{
  "correctness": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "UNKNOWN", "INCORRECT"]>
  }
}
```

Current Input
```json
{INPUT}
```)P";

constexpr std::string_view kSpecGenerationPre = R"P(1. Context
We have a code sample with a known vulnerability. We need to check if a detector successfully "recalls" (finds) this specific issue.

2. Input Data
- Target Function and Its Contexts:{INPUT}- Code Status: {CODE_STATUS}
- CVE Description: {CVE_DESCRIPTION}
- Commit Message: {COMMIT_MESSAGE}
- Patch Diff: {CODE_DIFF}

3. Task
Generate a JSON Checklist with these specific dimensions:

Dimension 1: Verdict_Recall
- Create a check: "Does the analysis report contain a vulnerability in the target function that matches the semantic type [INSERT_VULN_TYPE_FROM_CVE]?"
- Instruction: Specify that finding this type is sufficient, even if other types are also listed.

Dimension 2: Evidence_Insecure_Code
- Identify the unique code snippet from the Diff (lines marked `-`) that causes the bug.
- Create a check: "Does the analysis explicitly cite the code snippet [INSERT_UNIQUE_CODE_SNIPPET] as the source of the issue?"

Dimension 3 : Reasoning_Mechanism
- Create a check: "Does the analysis explain the trigger condition? Specifically, that [INSERT_SPECIFIC_TRIGGER] (e.g., 'input length exceeds buffer' or 'integer wraps around') leads to the vulnerability."

4. Output Format (JSON Only)
```json
{
  "phase": "pre_patch",
  "checklist": [
    {
      "dimension": "Verdict_Recall",
      "description": "The analysis report includes a finding for the target function that semantically matches [INSERT_EXTRACTED_TYPE] (e.g., Integer Overflow)."
    },
    {
      "dimension": "Evidence_Insecure_Code",
      "description": "The analysis explicitly cites the code snippet [INSERT_UNIQUE_CODE_SNIPPET] (e.g., 'memcpy(dest, src, len)') as problematic."
    },
    {
      "dimension": "Reasoning_Mechanism",
      "description": "The analysis explains that the vulnerability exists because [INSERT_BRIEF_LOGIC] (e.g., length check is missing)."
    }
  ]
}
```)P";

constexpr std::string_view kSpecGenerationPost = R"P(1. Context
The code is NO_VUL regarding a specific previous vulnerability (Fixed).
We need to verify if the detector recognizes this safety or at least does not hallucinate the old bug.

2. Input Data
- Target Function and Its Contexts:{INPUT}- Code Status: {CODE_STATUS}
- CVE Description: {CVE_DESCRIPTION}
- Commit Message: {COMMIT_MESSAGE}
- Patch Diff: {CODE_DIFF}

3. Task
Generate a JSON Checklist with these specific dimensions:
Dimension 1: Verdict_Absence_of_Specific_Vuln
- Reflect the logic: "The analysis is correct if it concludes NO_VUL OR if the detected vulnerabilities DO NOT include [INSERT_OLD_VULN_TYPE]."

Dimension 2: Evidence_Safeguard_Code
- Identify the new check/sanitizer from the Diff (lines marked `+`).
- Create a check: "Does the analysis cite the code snippet [INSERT_SAFEGUARD_SNIPPET] as a safety factor?"

Dimension 3: Reasoning_Resolution
- Create a check: "Does the analysis explain that the code is safe because [INSERT_FIX_LOGIC]?"

4. Output Format (JSON Only)
```json
{
  "phase": "post_patch",
  "checklist": [
    {
      "dimension": "Verdict_Absence_of_Specific_Vuln",
      "description": "The analysis either concludes the function is NO_VUL, OR its list of detected vulnerabilities does NOT include '[INSERT_OLD_VULN_TYPE]'."
    },
    {
      "dimension": "Evidence_Safeguard_Code",
      "description": "The analysis explicitly cites the code snippet [INSERT_SAFEGUARD_SNIPPET] (e.g., 'if (size > MAX)') as a mitigating factor."
    },
    {
      "dimension": "Reasoning_Resolution",
      "description": "The analysis explains that the potential issue is prevented by [INSERT_LOGIC_SUMMARY] (e.g., validating input size)."
    }
  ]
}
```)P";

constexpr std::string_view kSpecJudgePre = R"P(1. Goal
Your task is to evaluate a vulnerability analysis for a code sample known to be HAS_VUL (vulnerable). Verify if the detector successfully identified the specific target vulnerability described in the Checklist.

2. Scoring Rubric
Dimension 1: Verdict (Strict Binary)
- CORRECT: The analysis identifies the specific vulnerability type requested in the checklist (e.g., "Buffer Overflow"). Ignore any extra/unrelated vulnerabilities listed by the detector. As long as the target is found, it is true.
- INCORRECT: The analysis fails to mention the target vulnerability type.

Dimension 2: Evidence (Insecure Code Snippet)
- CORRECT: The analysis quotes the exact code snippet (or a semantically identical variation) requested in the checklist.
- PARTIALLY CORRECT: The analysis cites the correct variable name or surrounding logic, but does not quote the specific snippet exactly. Or, it quotes a huge block of code that contains the snippet but lacks precision.
- INCORRECT: No specific evidence or incorrect code cited.

Dimension 3: Reasoning (Attack Mechanism)
- CORRECT: The analysis correctly explains both the root cause (e.g., "missing check") and the consequence (e.g., "overflow").
- PARTIALLY CORRECT: Explains the general issue (e.g., "unsafe copy") but misses technical details.
- INCORRECT: Incorrect or generic reasoning.

3. Input
The Ground Truth Checklist (Target: Vulnerable):
{CHECKLIST}

The Candidate Analysis:
{ANALYSIS}

4. Output Format (Json Only)
```json
{
  "Verdict_Recall": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "INCORRECT"]>
  },
  "Evidence_Insecure_Code": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "PARTIALLY CORRECT", "INCORRECT"]>
  },
  "Reasoning_Mechanism": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "PARTIALLY CORRECT", "INCORRECT"]>
  }
}
```)P";

constexpr std::string_view kSpecJudgePost = R"P(1. Goal
Your task is to evaluate a vulnerability analysis for a code sample known to be NO_VUL (vulnerability fixed). Verify if the detector correctly concludes the code is safe regarding the specific vulnerability.

2. Scoring Rubric
Dimension 1: Verdict (Strict Binary)
- CORRECT: The analysis says "NO_VUL" or The analysis reports other vulnerabilities but does not list the specific fixed vulnerability mentioned in the checklist.
- INCORRECT: The analysis explicitly claims the specific target vulnerability (e.g., the one described in the checklist) still exists.

Dimension 2: Evidence (Safeguard Snippet)
- CORRECT: The analysis quotes the exact safeguard code (e.g., the new check/sanitizer) requested in the checklist.
- PARTIALLY CORRECT: The analysis cites the correct variable name or surrounding logic, but does not quote the specific snippet exactly. Or, it quotes a huge block of code that contains the snippet but lacks precision.
- INCORRECT: No specific evidence or incorrect code cited.

Dimension 3: Reasoning (Safety Logic)
- CORRECT: Explains why the code is safe (e.g., "The new check prevents the overflow").
- PARTIALLY CORRECT: Vague acknowledgment of safety without specific logic.
- INCORRECT: Incorrect logic or claims the code is unsafe.

3. Input
The Ground Truth Checklist (Target: Safe/Fixed):
{CHECKLIST}

The Candidate Analysis:
{ANALYSIS}

4. Output Format (Json Only)
```json
{
  "Verdict_Absence_of_Specific_Vuln": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "INCORRECT"]>
  },
  "Evidence_Safeguard_Code": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "PARTIALLY CORRECT", "INCORRECT"]>
  },
  "Reasoning_Resolution": {
    "justification": "<Your brief reason>",
    "option": <choose from ["CORRECT", "PARTIALLY CORRECT", "INCORRECT"]>
  }
}
```)P";

using Substitution = std::pair<std::string_view, std::string_view>;

// Replaces placeholders found in the template only; substituted text is never
// rescanned, so user code containing "{INPUT}" is left alone.
std::string fill(std::string_view tmpl, std::initializer_list<Substitution> subs) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t brace = tmpl.find('{', pos);
    if (brace == std::string_view::npos) break;
    const Substitution* hit = nullptr;
    for (const auto& s : subs)
      if (tmpl.substr(brace, s.first.size()) == s.first) hit = &s;
    if (!hit) {
      out.append(tmpl.substr(pos, brace + 1 - pos));
      pos = brace + 1;
      continue;
    }
    out.append(tmpl.substr(pos, brace - pos));
    out.append(hit->second);
    pos = brace + hit->first.size();
  }
  out.append(tmpl.substr(std::min(pos, tmpl.size())));
  return out;
}

std::string join_lines(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += '\n';
    out += items[i];
  }
  return out;
}

std::string join_cwes(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  return out;
}

std::string_view code_status(Role role) { return role == Role::Vulnerable ? "PRE-PATCH" : "POST-PATCH"; }

}  // namespace

std::string render_code_sections(const Sample& sample) {
  const ContextBundle& ctx = sample.context;
  std::string out = "```Context\n";
  for (const auto* list : {&ctx.includes, &ctx.type_definitions, &ctx.macros, &ctx.global_variables,
                           &ctx.callee_functions}) {
    out += join_lines(*list);
    out += '\n';
  }
  out += "```\n\n```Code\n";
  out += "File: " + sample.file_path + "\n";
  out += "Method: " + sample.method_name + "\n";
  out += std::string(40, '-') + "\n";
  out += sample.code;
  if (!sample.code.empty() && sample.code.back() != '\n') out += '\n';
  out += "```\n";
  return out;
}

Prompt render_query(const Sample& sample, PromptTemplate tmpl) {
  const std::string sections = render_code_sections(sample);
  if (tmpl == PromptTemplate::Detector)
    return {std::string(kDetectorSystem), fill(kDetectorUser, {{"{SECTIONS}", sections}})};
  const GroundTruth& gt = sample.ground_truth;
  const std::string cwes = join_cwes(gt.cwe_ids);
  return {std::string(kDetectorSystem), fill(kRationalizationUser, {{"{INPUT}", sections},
                                                                    {"{CODE_STATUS}", code_status(sample.role)},
                                                                    {"{CWE_ID}", cwes},
                                                                    {"{CVE_DESCRIPTION}", gt.cve_description},
                                                                    {"{COMMIT_MESSAGE}", gt.commit_message},
                                                                    {"{CODE_DIFF}", gt.patch_diff}})};
}

Prompt render_reasoning_judge_prompt(std::string_view analysis, const GroundTruth& truth, Role role) {
  nlohmann::ordered_json info;
  if (role == Role::Vulnerable) info["is_vulnerable"] = true;
  else info["target_CVE_in_code"] = false;
  info["cve_description"] = truth.cve_description;
  info["patch_commit_message"] = truth.commit_message;
  info["patch_commit_diff"] = truth.patch_diff;
  nlohmann::ordered_json input;
  input["analysis"] = analysis;
  input["ground_truth_info"] = std::move(info);
  const std::string rendered = input.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
  const std::string_view tmpl = role == Role::Vulnerable ? kJudgeVulnerableUser : kJudgePatchedUser;
  return {std::string(kEvaluatorSystem), fill(tmpl, {{"{INPUT}", rendered}})};
}

Prompt render_spec_generation_prompt(const Sample& sample) {
  const GroundTruth& gt = sample.ground_truth;
  const std::string sections = render_code_sections(sample);
  const std::string_view tmpl = sample.role == Role::Vulnerable ? kSpecGenerationPre : kSpecGenerationPost;
  return {std::string(), fill(tmpl, {{"{INPUT}", sections},
                                     {"{CODE_STATUS}", code_status(sample.role)},
                                     {"{CVE_DESCRIPTION}", gt.cve_description},
                                     {"{COMMIT_MESSAGE}", gt.commit_message},
                                     {"{CODE_DIFF}", gt.patch_diff}})};
}

Prompt render_spec_judge_prompt(std::string_view analysis, const SpecChecklist& checklist) {
  nlohmann::ordered_json doc;
  doc["phase"] = to_string(checklist.phase);
  doc["checklist"] = nlohmann::ordered_json::array();
  for (const auto& item : checklist.items) {
    nlohmann::ordered_json entry;
    entry["dimension"] = item.dimension;
    entry["description"] = item.description;
    doc["checklist"].push_back(std::move(entry));
  }
  const std::string rendered = doc.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
  if (checklist.phase == SpecPhase::PrePatch)
    return {std::string(kEvaluatorSystem), fill(kSpecJudgePre, {{"{CHECKLIST}", rendered}, {"{ANALYSIS}", analysis}})};
  return {std::string(), fill(kSpecJudgePost, {{"{CHECKLIST}", rendered}, {"{ANALYSIS}", analysis}})};
}

std::vector<ChatMessage> to_messages(const Prompt& prompt) {
  std::vector<ChatMessage> out;
  if (!prompt.system.empty()) out.push_back({"system", prompt.system});
  out.push_back({"user", prompt.user});
  return out;
}

}  // namespace vdpost
