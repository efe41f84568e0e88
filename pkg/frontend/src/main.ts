import { App, wireSubmitForm } from "./app.js";
import { SimforgeClient } from "./api.js";

// Same-origin by default; data-api-base on <body> overrides for development.
const base = document.body.dataset.apiBase ?? "";
const client = new SimforgeClient(base);

const root = document.getElementById("view");
const banner = document.getElementById("offline-banner");
if (!root || !banner) {
  throw new Error("index.html is missing #view or #offline-banner");
}

const app = new App(client, root, banner);
wireSubmitForm(client, () => void app.route());
app.start();
