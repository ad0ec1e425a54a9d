// Browser entry point. Expects the page URL to carry the session and,
// in development, a user to sign in as:
//   workbook.html?session=id0001&user=maria&role=student
// The API is assumed to live on the same origin unless ?api= overrides it.

import { ApiClient } from "./api";
import { WorkbookController } from "./app";

window.onload = async () => {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session");
  const root = document.getElementById("workbook") ?? document.body;
  if (!sessionId) {
    root.textContent = "No session given: add ?session=<id> to the URL.";
    return;
  }

  const api = new ApiClient(params.get("api") ?? window.location.origin);
  const user = params.get("user");
  if (user) {
    const role = params.get("role") ?? "student";
    await api.devToken(user, role as "student" | "teacher" | "researcher");
  }

  const controller = new WorkbookController({ api });
  controller.attach(root as HTMLElement);
  controller.start(sessionId);
};
