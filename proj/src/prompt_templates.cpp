// Metaprompt scaffolding used for data generation. The worked examples are
// fixed; render_* substitutes only the task slots.

#include <string_view>

namespace flowkit::templates {

const std::string_view kStaticInstructionText =
    "Apply your background knowledge of workflow automation, along with the given set of "
    "function definitions, examples of intermediate language that is used to represent a flow "
    "and generate a DSL representation of the input. Pay attention to the connectors that will "
    "be needed, and the parameters that the user specified. If there are missing parameters, do "
    "not fill them with made up values.";

const std::string_view kF2nlHeader =
    R"(LEARNING TASK: Here I have given three examples of automation flows (contexts) and three paraphrased queries (completions) for each in order. Go through that and complete the INFERENCE TASK given after.

context 1: DSL1
completion 1a: Update a record in a Dataverse table when a new item is added to a sharepoint list
completion 1b: When a new item is added to a sharepoint list update a record in a Dataverse table
completion 1c: Update a Dataverse table when a new item is added to a sharepoint list

context 2: DSL2
completion 2a: List rows in an excel table and copy them to a sharepoint list
completion 2b: List all the rows in an excel table and copy them to a sharepoint list
completion 2c: List out rows in an excel table, then copy them to a sharepoint list

context 3: DSL3
completion 3a: Update an item in a SharePoint list when a task is completed in Planner.
completion 3b: As soon as a task is completed in Planner, update an item in a SharePoint list
completion 3c: When a planner task is completed, Update items in a SharePoint list.


INFERENCE TASK: There are 5 numbered contexts given below. Fill in the corresponding 3 paraphrased completions for each at the end in the right order. There should be 15 completions corresponding to the 5 contexts.

)";

const std::string_view kF2nlSlots =
    R"(
completion 4a:
completion 4b:
completion 4c:
completion 5a:
completion 5b:
completion 5c:
completion 6a:
completion 6b:
completion 6c:
completion 7a:
completion 7b:
completion 7c:
completion 8a:
completion 8b:
completion 8c:)";

const std::string_view kStepsHeader =
    R"(You are an AI assistant that helps to summarize steps for an automation flow. You will be given the task, the corresponding flow and the list of functions (signatures) in the flow. You need to write the steps as simply as possible, without embellishments.

Here are three examples.
1.
"task":
"Create a sharepoint list item from a company form response."

"flow": DSL1

"signatures":

"shared_forms.CreateFormWebhook",
"shared_forms.GetFormResponseById",
"shared_sharepointonline.PostItem"

steps:
"The user wants to create a flow that automatically generates a SharePoint list item based on a Form response. To achieve this, the flow will utilize the CreateFormWebhook and GetFormResponseById functions from Forms, as well as the PostItem function from SharePoint Online."

2.
"task":
"On a weekly basis, list my planner tasks and email them to me."

"flow": DSL2

"signatures":

"shared_office365.SendEmailV2",
"commonTrigger.Recurrence",
"shared_planner.ListMyTasks_V2"

steps:
"The user wants a weekly summary of their planner tasks emailed to them. To achieve this, the flow will use the commonTrigger.Recurrence function to set the weekly schedule, shared_planner.ListMyTasks_V2 to retrieve the tasks, and shared_office365.SendEmailV2 to send the prepared email with the list of tasks."

3.
"task":
"Save attachments from new emails to sharepoint and mark them as read."

"flow": DSL3

"signatures":

"shared_sharepointonline.CreateFile",
"shared_office365.OnNewEmailV3",
"shared_office365.MarkAsRead_V3"

steps:
"The user wants to create a Flow that saves attachments from new emails to SharePoint, and marks the emails as read. To achieve this, I will use the OnNewEmailV3 trigger, CreateFile function from SharePoint Online, and the MarkAsRead_V3 function from Office 365."

Now you write the steps for the next one, remember to keep it simple and very short. No bullet pointed list.

4.
"task":
)";

const std::string_view kParaphraseHeader =
    R"(You are an AI assistant that helps to paraphrase natural language user queries for a workflow automation. You will be given the query and the explanation for the query/task.

)";

}  // namespace flowkit::templates
