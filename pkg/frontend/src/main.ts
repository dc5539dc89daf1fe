/** Entry point: mount the app on the page shell. */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (root) {
  new App(root, new ApiClient(""));
}
