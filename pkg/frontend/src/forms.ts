/** Schema-driven form rendering. The gateway serves one schema per k-type;
 * each field kind maps onto a native input so no widget library is needed.
 *
 * Kinds: text and number become inputs, quantity is a number input with the
 * unit shown next to it, boolean becomes a checkbox and term-ref a select
 * over the allowed concept IRIs. */

import type { FormFieldDoc, FormSchemaDoc } from "./types.js";

function shorten(iri: string): string {
  const cut = Math.max(iri.lastIndexOf("/"), iri.lastIndexOf("#"));
  return cut >= 0 ? iri.slice(cut + 1) : iri;
}

function inputFor(doc: Document, field: FormFieldDoc): HTMLElement {
  if (field.kind === "boolean") {
    const box = doc.createElement("input");
    box.type = "checkbox";
    box.name = field.key;
    return box;
  }
  if (field.kind === "term-ref") {
    const select = doc.createElement("select");
    select.name = field.key;
    if (!field.required) {
      const blank = doc.createElement("option");
      blank.value = "";
      blank.textContent = "";
      select.appendChild(blank);
    }
    for (const iri of field.options) {
      const option = doc.createElement("option");
      option.value = iri;
      option.textContent = shorten(iri);
      select.appendChild(option);
    }
    return select;
  }
  const input = doc.createElement("input");
  input.name = field.key;
  input.type = field.kind === "text" ? "text" : "number";
  if (input.type === "number") input.step = "any";
  if (field.required) input.required = true;
  return input;
}

/** Builds a form element for a schema. Labels carry the field label plus
 * the unit for quantities; data-concept records the backing vocabulary
 * term so the detail view can link it. */
export function renderForm(doc: Document, schema: FormSchemaDoc): HTMLFormElement {
  const form = doc.createElement("form");
  form.className = "kitem-form";
  form.dataset.ktype = schema.ktype;
  form.dataset.version = String(schema.version);

  for (const field of schema.fields) {
    const row = doc.createElement("label");
    row.className = "form-row";
    row.dataset.concept = field.concept;

    const caption = doc.createElement("span");
    caption.textContent =
      field.kind === "quantity" && field.unit
        ? `${field.label} [${shorten(field.unit)}]`
        : field.label;
    if (field.required) caption.textContent += " *";
    row.appendChild(caption);
    row.appendChild(inputFor(doc, field));
    form.appendChild(row);
  }

  const submit = doc.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit";
  form.appendChild(submit);
  return form;
}

export class FormReadError extends Error {}

/** Collects the entered values, coercing them to the types the gateway
 * expects. Empty optional fields are omitted entirely; empty required
 * fields raise. */
export function readForm(
  form: HTMLFormElement,
  schema: FormSchemaDoc,
): Record<string, unknown> {
  const values: Record<string, unknown> = {};
  for (const field of schema.fields) {
    const control = form.elements.namedItem(field.key);
    if (!(control instanceof HTMLInputElement) && !(control instanceof HTMLSelectElement)) {
      throw new FormReadError(`no control for field ${field.key}`);
    }
    if (field.kind === "boolean") {
      values[field.key] = (control as HTMLInputElement).checked;
      continue;
    }
    const raw = control.value.trim();
    if (raw === "") {
      if (field.required) {
        throw new FormReadError(`field ${field.key} is required`);
      }
      continue;
    }
    if (field.kind === "number" || field.kind === "quantity") {
      const parsed = Number(raw);
      if (!Number.isFinite(parsed)) {
        throw new FormReadError(`field ${field.key} is not a number: ${raw}`);
      }
      values[field.key] = parsed;
    } else {
      values[field.key] = raw;
    }
  }
  return values;
}
